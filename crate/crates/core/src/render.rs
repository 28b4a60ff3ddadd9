//! Box and linear renderings of DRSs.

use std::fmt;
use std::str::FromStr;

use crate::drs::{Condition, Drs, Marker};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderStyle {
    #[default]
    Box,
    Linear,
}

impl FromStr for RenderStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "box" => Ok(RenderStyle::Box),
            "linear" => Ok(RenderStyle::Linear),
            other => Err(format!("unknown render style `{other}` (expected box or linear)")),
        }
    }
}

impl fmt::Display for RenderStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RenderStyle::Box => "box",
            RenderStyle::Linear => "linear",
        })
    }
}

pub fn render(k: &Drs, style: RenderStyle) -> String {
    match style {
        RenderStyle::Box => render_box(k),
        RenderStyle::Linear => k.to_string(),
    }
}

/// A monospace drawing with one box per sub-DRS, conditions listed under
/// the universe line.
pub fn render_box(k: &Drs) -> String {
    let mut out = box_lines(k).join("\n");
    out.push('\n');
    out
}

type Block = Vec<String>;

fn width(s: &str) -> usize {
    s.chars().count()
}

fn block_width(b: &Block) -> usize {
    b.iter().map(|l| width(l)).max().unwrap_or(0)
}

fn pad(s: &str, w: usize) -> String {
    let mut out = s.to_string();
    out.extend(std::iter::repeat_n(' ', w.saturating_sub(width(s))));
    out
}

fn short(m: &Marker) -> String {
    format!("{}{}", m.sort.tag(), m.index)
}

fn box_lines(k: &Drs) -> Block {
    let header = k.universe().iter().map(short).collect::<Vec<_>>().join(" ");
    let body: Block = k.conditions().iter().flat_map(condition_lines).collect();
    let w = block_width(&body).max(width(&header));
    let rule = "─".repeat(w + 2);
    let mut out = vec![format!("┌{rule}┐"), format!("│ {} │", pad(&header, w)), format!("├{rule}┤")];
    out.extend(body.iter().map(|l| format!("│ {} │", pad(l, w))));
    out.push(format!("└{rule}┘"));
    out
}

/// Place `left` and `right` side by side with `sep` on the universe row.
fn beside(left: Block, sep: &str, right: Block) -> Block {
    let lw = block_width(&left);
    let blank = " ".repeat(width(sep));
    let h = left.len().max(right.len());
    (0..h)
        .map(|i| {
            let l = left.get(i).map(String::as_str).unwrap_or("");
            let r = right.get(i).map(String::as_str).unwrap_or("");
            let s = if i == 1 { sep } else { &blank };
            format!("{}{s}{r}", pad(l, lw)).trim_end().to_string()
        })
        .collect()
}

fn labelled(label: &str, k: &Drs) -> Block {
    beside(vec![String::new(), label.to_string()], "", box_lines(k))
}

fn condition_lines(c: &Condition) -> Block {
    match c {
        Condition::Pred { name, args } => {
            vec![format!("{name}({})", args.iter().map(short).collect::<Vec<_>>().join(","))]
        }
        Condition::Eq(a, b) => vec![format!("{}={}", short(a), short(b))],
        Condition::Impl(a, b) => beside(box_lines(a), " ⇒ ", box_lines(b)),
        Condition::Disj(a, b) => beside(box_lines(a), " ∨ ", box_lines(b)),
        Condition::Neg(a) => labelled("¬ ", a),
        Condition::Alpha(a) => labelled("α: ", a),
        Condition::Qualia(role, a) => labelled(&format!("Q[{role}]: "), a),
    }
}
