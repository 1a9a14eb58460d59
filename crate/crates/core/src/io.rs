//! Text formats for grid modules (`.pm2`) and zigzags (`.zz`).
//!
//! Both are line oriented; `#` starts a comment and blank lines are ignored.
//!
//! ```text
//! field 2
//! box 1 1
//! dims
//! 0 0 1
//! hmap 0 0      # d(x+1,y) rows of d(x,y) entries
//! 1
//! vmap 0 0
//! 1
//! ```
//!
//! Maps touching a zero space carry no entries and are left out; any other
//! omitted map is read as zero. The writers emit the canonical form: grades
//! in lexicographic order, every map between nonzero spaces, one matrix row
//! per line.
//!
//! ```text
//! field 2
//! len 3
//! dims 1 2 1
//! map 1 fwd     # matrix M_1 -> M_2
//! 1
//! 0
//! map 2 bwd     # matrix M_3 -> M_2
//! 0
//! 1
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::grid::{grades_in, GridBuilder, GridError, GridModule};
use crate::linalg::{DenseMatrix, LinalgError, PrimeField};
use crate::zigzag::{Direction, ZigzagError, ZigzagMap, ZigzagModule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Field { line: usize, source: LinalgError },
    #[error("invalid module: {0}")]
    Module(#[from] GridError),
    #[error("invalid zigzag: {0}")]
    Zigzag(#[from] ZigzagError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Non-empty lines with comments stripped, tagged with 1-based line numbers.
struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items: Vec<_> = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let body = l.split('#').next().unwrap_or("");
                let toks: Vec<&str> = body.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect();
        let last_line = text.lines().count().max(1);
        Self {
            items,
            pos: 0,
            last_line,
        }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), FormatError> {
        let item = self
            .items
            .get(self.pos)
            .cloned()
            .ok_or_else(|| syntax(self.last_line, format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(item)
    }

    /// A line `keyword a b ...` with exactly `n` arguments.
    fn keyword(&mut self, keyword: &str, n: usize) -> Result<(usize, Vec<&'a str>), FormatError> {
        let (line, toks) = self.next(&format!("`{keyword}`"))?;
        if toks[0] != keyword {
            return Err(syntax(line, format!("expected `{keyword}`, found `{}`", toks[0])));
        }
        if toks.len() != n + 1 {
            return Err(syntax(
                line,
                format!("`{keyword}` takes {n} argument(s), found {}", toks.len() - 1),
            ));
        }
        Ok((line, toks[1..].to_vec()))
    }
}

fn number<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T, FormatError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected a non-negative integer, found `{tok}`")))
}

fn parse_field(lines: &mut Lines) -> Result<PrimeField, FormatError> {
    let (line, args) = lines.keyword("field", 1)?;
    PrimeField::new(number(line, args[0])?).map_err(|source| FormatError::Field { line, source })
}

fn parse_matrix(
    lines: &mut Lines,
    field: PrimeField,
    rows: usize,
    cols: usize,
) -> Result<DenseMatrix, FormatError> {
    if rows == 0 || cols == 0 {
        return Ok(DenseMatrix::zeros(field, rows, cols));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line, toks) = lines.next("a matrix row")?;
        if toks.len() != cols {
            return Err(syntax(line, format!("expected {cols} entries, found {}", toks.len())));
        }
        for t in toks {
            let v: i64 = t
                .parse()
                .map_err(|_| syntax(line, format!("`{t}` is not an integer")))?;
            entries.push(field.reduce(v));
        }
    }
    Ok(DenseMatrix::from_row_major(field, rows, cols, entries).expect("sized"))
}

fn write_matrix(out: &mut String, m: &DenseMatrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(u32::to_string).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
}

/// Parses and validates a `.pm2` module.
pub fn parse_module(text: &str) -> Result<GridModule, FormatError> {
    let mut lines = Lines::new(text);
    let field = parse_field(&mut lines)?;
    let (line, args) = lines.keyword("box", 2)?;
    let bounds: (usize, usize) = (number(line, args[0])?, number(line, args[1])?);
    let mut b = GridBuilder::new(field, bounds);
    lines.keyword("dims", 0)?;
    while let Some((line, toks)) = lines.peek().cloned() {
        if toks[0] == "hmap" || toks[0] == "vmap" {
            break;
        }
        lines.pos += 1;
        if toks.len() != 3 {
            return Err(syntax(line, "expected `<x> <y> <dim>`"));
        }
        let (x, y, d): (usize, usize, usize) =
            (number(line, toks[0])?, number(line, toks[1])?, number(line, toks[2])?);
        b.set_dim(x, y, d).map_err(|e| syntax(line, e.to_string()))?;
    }
    while lines.peek().is_some() {
        let (line, toks) = lines.next("a map block")?;
        let horizontal = match toks[0] {
            "hmap" => true,
            "vmap" => false,
            other => return Err(syntax(line, format!("expected `hmap` or `vmap`, found `{other}`"))),
        };
        if toks.len() != 3 {
            return Err(syntax(line, format!("`{}` takes 2 arguments", toks[0])));
        }
        let (x, y): (usize, usize) = (number(line, toks[1])?, number(line, toks[2])?);
        let in_box = if horizontal {
            x < bounds.0 && y <= bounds.1
        } else {
            x <= bounds.0 && y < bounds.1
        };
        if !in_box {
            return Err(syntax(line, format!("{} ({x},{y}) leaves the box", toks[0])));
        }
        let (tx, ty) = if horizontal { (x + 1, y) } else { (x, y + 1) };
        let m = parse_matrix(&mut lines, field, b.dim(tx, ty), b.dim(x, y))?;
        let set = if horizontal {
            b.set_hmap(x, y, m)
        } else {
            b.set_vmap(x, y, m)
        };
        set.map_err(|e| syntax(line, e.to_string()))?;
    }
    Ok(b.build()?)
}

/// Canonical `.pm2` text.
pub fn write_module(m: &GridModule) -> String {
    let (s1, s2) = m.bounds();
    let mut out = String::new();
    writeln!(out, "field {}", m.field().modulus()).unwrap();
    writeln!(out, "box {s1} {s2}").unwrap();
    writeln!(out, "dims").unwrap();
    for g in grades_in(m.bounds()) {
        if m.dim(g) > 0 {
            writeln!(out, "{} {} {}", g.x, g.y, m.dim(g)).unwrap();
        }
    }
    for x in 0..s1 {
        for y in 0..=s2 {
            let h = m.hmap(x, y);
            if h.rows() > 0 && h.cols() > 0 {
                writeln!(out, "hmap {x} {y}").unwrap();
                write_matrix(&mut out, h);
            }
        }
    }
    for x in 0..=s1 {
        for y in 0..s2 {
            let v = m.vmap(x, y);
            if v.rows() > 0 && v.cols() > 0 {
                writeln!(out, "vmap {x} {y}").unwrap();
                write_matrix(&mut out, v);
            }
        }
    }
    out
}

/// Parses a `.zz` zigzag. Every map block must be present, in order.
pub fn parse_zigzag(text: &str) -> Result<ZigzagModule, FormatError> {
    let mut lines = Lines::new(text);
    let field = parse_field(&mut lines)?;
    let (line, args) = lines.keyword("len", 1)?;
    let len: usize = number(line, args[0])?;
    if len == 0 {
        return Err(syntax(line, "a zigzag needs at least one vertex"));
    }
    let (line, args) = lines.keyword("dims", len)?;
    let dims = args
        .iter()
        .map(|t| number(line, t))
        .collect::<Result<Vec<usize>, _>>()?;
    let mut maps = Vec::with_capacity(len - 1);
    for i in 1..len {
        let (line, args) = lines.keyword("map", 2)?;
        let index: usize = number(line, args[0])?;
        if index != i {
            return Err(syntax(line, format!("expected map {i}, found map {index}")));
        }
        let direction = match args[1] {
            "fwd" => Direction::Forward,
            "bwd" => Direction::Backward,
            other => return Err(syntax(line, format!("direction must be fwd or bwd, found `{other}`"))),
        };
        let (rows, cols) = match direction {
            Direction::Forward => (dims[i], dims[i - 1]),
            Direction::Backward => (dims[i - 1], dims[i]),
        };
        let matrix = parse_matrix(&mut lines, field, rows, cols)?;
        maps.push(ZigzagMap { matrix, direction });
    }
    if let Some((line, toks)) = lines.peek() {
        return Err(syntax(*line, format!("unexpected `{}` after the last map", toks[0])));
    }
    Ok(ZigzagModule::new(field, dims, maps)?)
}

/// Canonical `.zz` text.
pub fn write_zigzag(z: &ZigzagModule) -> String {
    let mut out = String::new();
    writeln!(out, "field {}", z.field().modulus()).unwrap();
    writeln!(out, "len {}", z.len()).unwrap();
    let dims: Vec<String> = z.dims().iter().map(usize::to_string).collect();
    writeln!(out, "dims {}", dims.join(" ")).unwrap();
    for (i, m) in z.maps().iter().enumerate() {
        writeln!(out, "map {} {}", i + 1, m.direction.as_str()).unwrap();
        if m.matrix.cols() > 0 {
            write_matrix(&mut out, &m.matrix);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_cz_family, gen_hook, gen_simple};
    use crate::grid::{free_module, Grade};
    use crate::zigzag::{eight_bars, gen_from_barcode};

    const SIMPLE: &str = "field 2\nbox 1 1\ndims\n0 0 1\n";

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn parses_simple() {
        let m = parse_module(SIMPLE).unwrap();
        assert_eq!(m.bounds(), (1, 1));
        assert_eq!(m.dim(Grade::new(0, 0)), 1);
        assert_eq!(m.total_dim(), 1);
        assert_eq!(m, gen_simple(Grade::new(0, 0), gf(2), (1, 1)).unwrap());
        assert_eq!(write_module(&m), SIMPLE);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# a module\nfield 3   # prime\n\nbox 1 0\ndims\n0 0 1\n1 0 1\nhmap 0 0\n2\n";
        let m = parse_module(text).unwrap();
        assert_eq!(m.hmap(0, 0).get(0, 0), 2);
    }

    #[test]
    fn non_commuting_square_is_named() {
        let text = "field 2\nbox 1 1\ndims\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n\
                    hmap 0 0\n1\nhmap 0 1\n1\nvmap 0 0\n1\nvmap 1 0\n0\n";
        let err = parse_module(text).unwrap_err();
        assert!(err.to_string().contains("square at (0,0)"), "{err}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_module("field 4\nbox 1 1\ndims\n").unwrap_err();
        assert!(matches!(err, FormatError::Field { line: 1, .. }));
        let err = parse_module("field 2\nbox 1 1\ndims\n0 0 1\n1 0 2\nhmap 0 0\n1 1\n").unwrap_err();
        assert_eq!(
            err,
            FormatError::Syntax {
                line: 7,
                msg: "expected 1 entries, found 2".into()
            }
        );
        let err = parse_module("field 2\nbox 1 1\ndims\n0 0 x\n").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 4, .. }));
    }

    #[test]
    fn module_round_trips() {
        let f = gf(5);
        let s = [(0, 1), (1, 0), (1, 0)].into_iter().map(Grade::from).collect();
        for m in [
            gen_simple(Grade::new(1, 1), f, (2, 3)).unwrap(),
            gen_hook(f, (2, 2)).unwrap(),
            gen_cz_family(3, f).unwrap(),
            free_module(&s, (2, 2), f).unwrap(),
        ] {
            let text = write_module(&m);
            assert_eq!(text, write_module(&m));
            let back = parse_module(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(write_module(&back), text);
        }
    }

    #[test]
    fn zigzag_round_trips() {
        let dirs = [Direction::Forward, Direction::Backward, Direction::Forward];
        let z = gen_from_barcode(&eight_bars(), &dirs, gf(2)).unwrap();
        let text = write_zigzag(&z);
        assert!(text.starts_with("field 2\nlen 4\ndims 4 5 5 3\nmap 1 fwd\n"));
        let back = parse_zigzag(&text).unwrap();
        assert_eq!(back, z);
        assert_eq!(write_zigzag(&back), text);
    }

    #[test]
    fn zigzag_requires_every_map() {
        let err = parse_zigzag("field 2\nlen 2\ndims 1 1\n").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 3, .. }));
        let err = parse_zigzag("field 2\nlen 2\ndims 1 1\nmap 1 up\n1\n").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 4, .. }));
    }
}
