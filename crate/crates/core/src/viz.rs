//! ASCII circuit diagrams with optional ANSI colors per element category.
//!
//! Columns follow the greedy depth layering, so a gate-only circuit draws as
//! exactly `depth` columns. Elements sharing a column whose drawn spans would
//! overlap are set side by side within it.
//!
//! Glyphs: `-` quantum wire, `=` classical wire, `|` connector, `*` control,
//! `(+)` controlled-X target, `x` swap, `[..]` gate box, `[M:label]`
//! measurement into `label`, `v` classical write, `[=1]`/`[=0]` classical
//! condition.

use std::fmt;

use crate::circuit::{Circuit, CircuitElement};
use crate::gates::{GateDef, GateFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Single,
    Two,
    Three,
    Control,
    Noise,
    Measure,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Single => "single",
            Category::Two => "two",
            Category::Three => "three",
            Category::Control => "control",
            Category::Noise => "noise",
            Category::Measure => "measure",
        }
    }
}

/// A drawn circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedCircuit {
    /// One line per qubit, then one per classical bit.
    pub lines: Vec<String>,
    /// `(element index, category)` in column order.
    pub style_map: Vec<(usize, Category)>,
    pub columns: usize,
}

impl fmt::Display for RenderedCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

const RESET: &str = "\x1b[0m";

/// ANSI color code: single blue, two-qubit magenta, three-qubit terminal
/// default, noise red, measurement gray. Controlled gates take the color of
/// their total width.
fn color_code(cat: Category, arity: usize) -> &'static str {
    match cat {
        Category::Single => "\x1b[34m",
        Category::Two => "\x1b[35m",
        Category::Three => "\x1b[39m",
        Category::Noise => "\x1b[31m",
        Category::Measure => "\x1b[90m",
        Category::Control if arity <= 2 => "\x1b[35m",
        Category::Control => "\x1b[39m",
    }
}

fn gate_category(g: &GateDef) -> Category {
    match g.family() {
        GateFamily::Single => Category::Single,
        GateFamily::Two => Category::Two,
        GateFamily::Three => Category::Three,
        GateFamily::Control => Category::Control,
        GateFamily::Arbitrary => match g.arity() {
            1 => Category::Single,
            2 => Category::Two,
            _ => Category::Three,
        },
    }
}

fn category(e: &CircuitElement) -> (Category, usize) {
    match e {
        CircuitElement::Gate(g) | CircuitElement::ClassicalControl { gate: g, .. } => {
            (gate_category(g), g.arity())
        }
        CircuitElement::Noise(n) => (Category::Noise, n.targets().len()),
        CircuitElement::Measure { qubits, .. } => (Category::Measure, qubits.len()),
    }
}

fn fmt_param(x: f64) -> String {
    format!("{x:.2}")
}

fn gate_label(g: &GateDef) -> String {
    let base = if g.family() == GateFamily::Control {
        g.name().strip_prefix('C').unwrap_or(g.name())
    } else {
        g.name()
    };
    if g.params().is_empty() {
        base.to_string()
    } else {
        let ps: Vec<String> = g.params().iter().map(|&p| fmt_param(p)).collect();
        format!("{base}({})", ps.join(","))
    }
}

/// Glyphs for a gate: `(row, text)` for each target or control row.
fn gate_cells(g: &GateDef) -> Vec<(usize, String)> {
    let (controls, targets) = g.targets().split_at(g.num_controls());
    let mut cells: Vec<(usize, String)> = controls.iter().map(|&c| (c, "*".to_string())).collect();
    let name = g.name();
    let is_x = matches!(name, "CX" | "CNOT" | "Toffoli" | "CCX" | "CCNOT") && targets.len() == 1;
    let is_swap = matches!(name, "SWAP" | "Fredkin" | "CSWAP") && targets.len() == 2;
    for &t in targets {
        let glyph = if is_x {
            "(+)".to_string()
        } else if is_swap {
            "x".to_string()
        } else {
            format!("[{}]", gate_label(g))
        };
        cells.push((t, glyph));
    }
    cells
}

struct Drawn {
    cells: Vec<(usize, String)>,
    span: (usize, usize),
    color: &'static str,
}

fn draw(e: &CircuitElement, clbit_row: &dyn Fn(&str) -> usize) -> (Drawn, Category) {
    let (cat, arity) = category(e);
    let cells = match e {
        CircuitElement::Gate(g) => gate_cells(g),
        CircuitElement::Noise(n) => n
            .targets()
            .iter()
            .map(|&t| (t, format!("[{}({})]", n.name(), fmt_param(n.p()))))
            .collect(),
        CircuitElement::Measure { qubits, clbits } => {
            let mut cells: Vec<(usize, String)> = qubits
                .iter()
                .zip(clbits)
                .map(|(&q, l)| (q, format!("[M:{l}]")))
                .collect();
            cells.extend(clbits.iter().map(|l| (clbit_row(l), "v".to_string())));
            cells
        }
        CircuitElement::ClassicalControl { clbit, value, gate } => {
            let mut cells = gate_cells(gate);
            cells.push((clbit_row(clbit), format!("[={value}]")));
            cells
        }
    };
    let lo = cells.iter().map(|c| c.0).min().unwrap_or(0);
    let hi = cells.iter().map(|c| c.0).max().unwrap_or(0);
    (
        Drawn {
            cells,
            span: (lo, hi),
            color: color_code(cat, arity),
        },
        cat,
    )
}

fn center(text: &str, width: usize, fill: char) -> String {
    let len = text.chars().count();
    let left = (width - len) / 2;
    let right = width - len - left;
    let mut s = String::with_capacity(width);
    s.extend(std::iter::repeat_n(fill, left));
    s.push_str(text);
    s.extend(std::iter::repeat_n(fill, right));
    s
}

/// Draws `c`. With `color` the element glyphs are wrapped in ANSI escapes;
/// stripping them gives exactly the uncolored drawing.
pub fn render_text(c: &Circuit, color: bool) -> RenderedCircuit {
    let n = c.num_qubits();
    let labels: Vec<&str> = c.clbits().collect();
    let rows = n + labels.len();
    let clbit_row = |l: &str| n + labels.iter().position(|x| *x == l).unwrap_or(0);

    // Greedy layering over qubit wires and classical bits.
    let mut frontier = vec![0usize; rows];
    let mut columns: Vec<Vec<Vec<Drawn>>> = Vec::new();
    let mut style_order: Vec<(usize, usize, usize, Category)> = Vec::new();
    for (i, e) in c.elements().iter().enumerate() {
        let (d, cat) = draw(e, &clbit_row);
        let touched: Vec<usize> = d.cells.iter().map(|c| c.0).collect();
        let layer = touched.iter().map(|&r| frontier[r]).max().unwrap_or(0);
        for &r in &touched {
            frontier[r] = layer + 1;
        }
        if columns.len() <= layer {
            columns.resize_with(layer + 1, Vec::new);
        }
        let slots = &mut columns[layer];
        let fits = |slot: &Vec<Drawn>| {
            slot.iter()
                .all(|o| o.span.1 < d.span.0 || d.span.1 < o.span.0)
        };
        let slot = match slots.iter().position(fits) {
            Some(s) => s,
            None => {
                slots.push(Vec::new());
                slots.len() - 1
            }
        };
        style_order.push((layer, slot, i, cat));
        slots[slot].push(d);
    }
    style_order.sort_by_key(|&(layer, slot, i, _)| (layer, slot, i));

    let names: Vec<String> = (0..n)
        .map(|q| format!("q{q}"))
        .chain(labels.iter().map(|l| l.to_string()))
        .collect();
    let pad = names.iter().map(String::len).max().unwrap_or(0);
    let fill_of = |r: usize| if r < n { '-' } else { '=' };
    let mut lines: Vec<String> = names
        .iter()
        .enumerate()
        .map(|(r, name)| format!("{name:<pad$}: {}", fill_of(r)))
        .collect();

    for slots in &columns {
        for slot in slots {
            let width = slot
                .iter()
                .flat_map(|d| d.cells.iter().map(|c| c.1.chars().count()))
                .max()
                .unwrap_or(1);
            for (r, line) in lines.iter_mut().enumerate() {
                let fill = fill_of(r);
                let owner = slot.iter().find(|d| d.span.0 <= r && r <= d.span.1);
                let cell = match owner {
                    None => center("", width, fill),
                    Some(d) => {
                        let text = d
                            .cells
                            .iter()
                            .find(|c| c.0 == r)
                            .map(|c| c.1.as_str())
                            .unwrap_or("|");
                        let body = center(text, width, fill);
                        if color {
                            let start = body.find(text).unwrap_or(0);
                            let end = start + text.len();
                            format!("{}{}{text}{RESET}{}", &body[..start], d.color, &body[end..])
                        } else {
                            body
                        }
                    }
                };
                line.push_str(&cell);
                line.push(fill);
            }
        }
    }
    RenderedCircuit {
        lines,
        style_map: style_order.into_iter().map(|(_, _, i, cat)| (i, cat)).collect(),
        columns: columns.len(),
    }
}

/// Removes ANSI escape sequences.
pub fn strip_ansi(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(ch) = chars.next() {
        if ch == '\x1b' {
            for c in chars.by_ref() {
                if c.is_ascii_alphabetic() {
                    break;
                }
            }
        } else {
            out.push(ch);
        }
    }
    out
}
