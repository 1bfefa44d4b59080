//! Grid diagrams of multiplicity structure over a dyadic partition, and
//! their ASCII and SVG renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::SpectrumReport;
use crate::error::{Error, Result};
use crate::index_sets::LambdaSpec;
use crate::matrix::{ComplexMatrix, GnsSpace};
use crate::nset::NSet;
use crate::puk::CutdownOracle;
use crate::scalar::{tol, Real};

/// A square grid of sets.
///
/// Off-diagonal cells describe `𝒜′ eᵢ J eⱼ J`. Diagonal cells are `{1}` in
/// an unmarked diagram. `interior[a]` collects values located inside the
/// diagonal block of `a` but not resolved by the grid (pairs whose first
/// sequences coincide). With `diagonal_marker` set, the diagonal line
/// carries multiplicity 1 and a diagonal cell lists what lies off that line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityDiagram {
    pub size: usize,
    pub cells: Vec<Vec<NSet>>,
    #[serde(default, skip_serializing_if = "all_empty")]
    pub interior: Vec<NSet>,
    #[serde(default)]
    pub diagonal_marker: bool,
}

fn all_empty(v: &[NSet]) -> bool {
    v.iter().all(NSet::is_empty)
}

impl MultiplicityDiagram {
    pub fn new(cells: Vec<Vec<NSet>>, diagonal_marker: bool) -> Result<Self> {
        let size = cells.len();
        if size == 0 || cells.iter().any(|r| r.len() != size) {
            return Err(Error::InvalidInput("diagram cells must form a non-empty square".into()));
        }
        Ok(Self {
            size,
            cells,
            interior: vec![NSet::empty(); size],
            diagonal_marker,
        })
    }

    /// `log₂ size` when the size is a power of two.
    pub fn level(&self) -> Option<usize> {
        self.size
            .is_power_of_two()
            .then(|| self.size.trailing_zeros() as usize)
    }

    pub fn cell(&self, a: usize, b: usize) -> &NSet {
        &self.cells[a][b]
    }

    pub fn interior(&self, a: usize) -> NSet {
        self.interior.get(a).cloned().unwrap_or_default()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|a| (0..a).all(|b| self.cells[a][b] == self.cells[b][a]))
    }

    /// Union of the off-diagonal cells and the interiors.
    pub fn total(&self) -> NSet {
        let mut out = NSet::empty();
        for a in 0..self.size {
            for b in 0..self.size {
                if a != b || self.diagonal_marker {
                    out.extend_from(&self.cells[a][b]);
                }
            }
            out.extend_from(&self.interior(a));
        }
        out
    }

    /// Halves the grid. Cross cells are unioned; everything inside a coarse
    /// diagonal block moves to its interior.
    pub fn coarsen(&self) -> Result<Self> {
        if self.size < 2 || !self.size.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("cannot coarsen a {0}×{0} grid", self.size)));
        }
        let half = self.size / 2;
        let mut cells = vec![vec![NSet::empty(); half]; half];
        let mut interior = vec![NSet::empty(); half];
        for a in 0..self.size {
            interior[a / 2].extend_from(&self.interior(a));
            for b in 0..self.size {
                let (ca, cb) = (a / 2, b / 2);
                if ca != cb {
                    cells[ca][cb].extend_from(&self.cells[a][b]);
                } else if a != b || self.diagonal_marker {
                    interior[ca].extend_from(&self.cells[a][b]);
                }
            }
        }
        for (k, row) in cells.iter_mut().enumerate() {
            row[k] = if self.diagonal_marker {
                NSet::empty()
            } else {
                NSet::one()
            };
        }
        let mut out = Self {
            size: half,
            cells,
            interior,
            diagonal_marker: false,
        };
        if self.diagonal_marker {
            out = out.marked();
        }
        Ok(out)
    }

    /// Coarsens down to `level` and moves each interior onto its diagonal
    /// cell, with the diagonal line marked.
    pub fn limit_view(&self, level: usize) -> Result<Self> {
        let mut d = self.clone();
        while d.size > 1 << level {
            d = d.coarsen()?;
        }
        if d.size != 1 << level {
            return Err(Error::InvalidInput(format!(
                "cannot view a {0}×{0} grid at level {level}",
                self.size
            )));
        }
        Ok(d.marked())
    }

    fn marked(mut self) -> Self {
        if !self.diagonal_marker {
            for a in 0..self.size {
                self.cells[a][a] = std::mem::take(&mut self.interior[a]);
            }
            self.diagonal_marker = true;
        } else {
            for a in 0..self.size {
                let inner = std::mem::take(&mut self.interior[a]);
                self.cells[a][a].extend_from(&inner);
            }
        }
        self.interior = vec![NSet::empty(); self.size];
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut d: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if d.size != d.cells.len() || d.cells.iter().any(|r| r.len() != d.size) {
            return Err(Error::Parse(format!("diagram cells are not {0}×{0}", d.size)));
        }
        if d.interior.is_empty() {
            d.interior = vec![NSet::empty(); d.size];
        } else if d.interior.len() != d.size {
            return Err(Error::Parse("interior length differs from size".into()));
        }
        Ok(d)
    }
}

/// Level-`(r+1)` diagram of the construction truncated at level `r`.
///
/// The cell `(a, b)`, `a ≠ b`, first differing at bit `t`, collects
/// `{Λ^{(t)}_{i,j}} · oracle(a|_{t+1}, b|_{t+1})` over level-`t` sibling pairs
/// with `(i⁰, j⁰) = (a|_{t+1}, b|_{t+1})`. A pair with `i⁰ = j⁰` adds to the
/// interior of every fine index under `i⁰`.
pub fn diagram_from_construction(
    spec: &LambdaSpec,
    oracle: &CutdownOracle,
    r: usize,
) -> Result<MultiplicityDiagram> {
    if oracle.level() < r + 1 {
        return Err(Error::OracleGap {
            needed: r + 1,
            available: oracle.level(),
        });
    }
    let size = 1usize << (r + 1);
    let mut cells = vec![vec![NSet::empty(); size]; size];
    let mut interior = vec![NSet::empty(); size];
    for a in spec.assignments(r)? {
        let p = &a.pair;
        let (i0, j0) = (p.i.seqs()[0], p.j.seqs()[0]);
        let value = NSet::singleton(a.value).product(oracle.entry(p.r + 1, i0.bits(), j0.bits())?);
        let shift = r - p.r;
        let span = 1usize << shift;
        let (ri, rj) = ((i0.bits() as usize) << shift, (j0.bits() as usize) << shift);
        if i0 == j0 {
            for x in &mut interior[ri..ri + span] {
                x.extend_from(&value);
            }
        } else {
            for x in ri..ri + span {
                for y in rj..rj + span {
                    cells[x][y].extend_from(&value);
                    cells[y][x].extend_from(&value);
                }
            }
        }
    }
    for (k, row) in cells.iter_mut().enumerate() {
        row[k] = NSet::one();
    }
    Ok(MultiplicityDiagram {
        size,
        cells,
        interior,
        diagonal_marker: false,
    })
}

/// Grid of the blocks of `report` under `L(eᵢ) R(fⱼ) = eᵢ J fⱼ J`.
///
/// `report` must describe an algebra on `space` that contains every such
/// product; each product must be a sum of its block projections.
pub fn diagram_from_numeric<T: Real>(
    report: &SpectrumReport<T>,
    rows: &[ComplexMatrix<T>],
    cols: &[ComplexMatrix<T>],
    space: &GnsSpace<T>,
) -> Result<MultiplicityDiagram> {
    if rows.len() != cols.len() || rows.is_empty() {
        return Err(Error::InvalidInput("row and column partitions must be non-empty and of equal length".into()));
    }
    let eps = T::tol(tol::PROJECTION);
    let lefts = rows.iter().map(|e| space.left(e)).collect::<Result<Vec<_>>>()?;
    let rights = cols.iter().map(|f| space.right(f)).collect::<Result<Vec<_>>>()?;
    let mut cells = vec![vec![NSet::empty(); rows.len()]; rows.len()];
    for (a, l) in lefts.iter().enumerate() {
        for (b, rt) in rights.iter().enumerate() {
            let p = l * rt;
            let mut covered = ComplexMatrix::zeros(space.dim(), space.dim());
            for (q, &rank) in report.block_projections.iter().zip(&report.multiplicities) {
                let pq = &p * q;
                let scale = q.frobenius_norm().max(T::one());
                if (&pq - q).frobenius_norm() <= eps * scale {
                    cells[a][b].insert((rank as u64).into());
                    covered = &covered + q;
                } else if pq.frobenius_norm() > eps * scale {
                    return Err(Error::NotInAlgebra {
                        residual: (&pq - q).frobenius_norm().as_f64(),
                    });
                }
            }
            let gap = (&p - &covered).frobenius_norm();
            if gap > eps * p.frobenius_norm().max(T::one()) {
                return Err(Error::NotInAlgebra { residual: gap.as_f64() });
            }
        }
    }
    Ok(MultiplicityDiagram {
        size: rows.len(),
        cells,
        interior: vec![NSet::empty(); rows.len()],
        diagonal_marker: false,
    })
}

/// Output format of [`render`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(Format::Ascii),
            "svg" => Ok(Format::Svg),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

fn cell_text(d: &MultiplicityDiagram, a: usize, b: usize) -> String {
    let set = d.cells[a][b].to_string();
    if a == b && d.diagonal_marker {
        if set.is_empty() {
            "\\".to_string()
        } else {
            format!("\\ {set}")
        }
    } else {
        set
    }
}

pub fn render(d: &MultiplicityDiagram, format: Format) -> String {
    match format {
        Format::Ascii => render_ascii(d),
        Format::Svg => render_svg(d),
    }
}

fn render_ascii(d: &MultiplicityDiagram) -> String {
    let texts: Vec<Vec<String>> = (0..d.size)
        .map(|a| (0..d.size).map(|b| cell_text(d, a, b)).collect())
        .collect();
    let width = texts.iter().flatten().map(|t| t.chars().count()).max().unwrap_or(0).max(1) + 2;
    let rule = {
        let mut s = String::from("+");
        for _ in 0..d.size {
            s.push_str(&"-".repeat(width));
            s.push('+');
        }
        s
    };
    let mut out = String::new();
    out.push_str(&rule);
    out.push('\n');
    for row in &texts {
        out.push('|');
        for t in row {
            let pad = width - 1 - t.chars().count();
            let _ = write!(out, " {t}{}|", " ".repeat(pad));
        }
        out.push('\n');
        out.push_str(&rule);
        out.push('\n');
    }
    out
}

fn render_svg(d: &MultiplicityDiagram) -> String {
    const CELL: usize = 48;
    const MARGIN: usize = 4;
    let side = d.size * CELL;
    let total = side + 2 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{side}" height="{side}" fill="white" stroke="black" stroke-width="1.5"/>"#
    );
    for k in 1..d.size {
        let p = MARGIN + k * CELL;
        let _ = writeln!(
            out,
            r#"<line x1="{p}" y1="{MARGIN}" x2="{p}" y2="{}" stroke="black"/>"#,
            MARGIN + side
        );
        let _ = writeln!(
            out,
            r#"<line x1="{MARGIN}" y1="{p}" x2="{}" y2="{p}" stroke="black"/>"#,
            MARGIN + side
        );
    }
    if d.diagonal_marker {
        let _ = writeln!(
            out,
            r#"<line x1="{MARGIN}" y1="{MARGIN}" x2="{0}" y2="{0}" stroke="black"/>"#,
            MARGIN + side
        );
    }
    for a in 0..d.size {
        for b in 0..d.size {
            let text = d.cells[a][b].to_string();
            if text.is_empty() {
                continue;
            }
            let (mut x, mut y) = (MARGIN + b * CELL + CELL / 2, MARGIN + a * CELL + CELL / 2);
            if a == b && d.diagonal_marker {
                // Below the diagonal line.
                x -= CELL / 5;
                y += CELL / 5;
            }
            let _ = writeln!(
                out,
                r#"<text x="{x}" y="{y}" font-family="monospace" font-size="14" text-anchor="middle" dominant-baseline="middle">{text}</text>"#
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
