//! Text formats for instances.
//!
//! The native format is line oriented; `#` starts a comment and tokens are
//! whitespace separated:
//!
//! ```text
//! p
//! q
//! C(1) W(1)_1 ... W(1)_p        # one line per bin type
//! ...
//! m
//! b_1 k_1                       # demand and incarnation count for item 1
//!   w_1 ... w_p                 # one line per incarnation
//! ...
//! ```
//!
//! The classical single-bin VBP format (`p`, capacity vector, `m`, then `m`
//! lines of `w_1 ... w_p b`) is accepted as a one-bin-type instance with unit
//! cost.  Costs may be integers, fractions (`7/2`) or decimals (`2.5`).

use num_rational::Ratio;

use super::{cost_to_string, BinType, Cost, Incarnation, Instance, ItemType};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

struct Tokens<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut tokens = Vec::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(idx) => &raw_line[..idx],
                None => raw_line,
            };
            let mut column = 1;
            for chunk in line.split_whitespace() {
                // Column of the chunk's first byte, 1-based.
                let offset = line[column - 1..].find(chunk).unwrap_or(0);
                column += offset;
                tokens.push(Token {
                    text: chunk,
                    line: lineno + 1,
                    column,
                });
                column += chunk.len();
            }
        }
        Tokens { tokens, pos: 0 }
    }

    fn next(&mut self, what: &str) -> Result<Token<'a>> {
        match self.tokens.get(self.pos) {
            Some(tok) => {
                self.pos += 1;
                Ok(*tok)
            }
            None => {
                let (line, column) = self
                    .tokens
                    .last()
                    .map(|t| (t.line, t.column + t.text.len()))
                    .unwrap_or((1, 1));
                Err(Error::syntax(
                    line,
                    column,
                    format!("unexpected end of input, expected {what}"),
                ))
            }
        }
    }

    fn remaining(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    /// Token counts of the meaningful "lines" in order, used for format
    /// detection.
    fn line_shape(&self) -> Vec<usize> {
        let mut shape = Vec::new();
        let mut current_line = 0;
        for tok in &self.tokens {
            if tok.line != current_line {
                shape.push(0);
                current_line = tok.line;
            }
            *shape.last_mut().unwrap() += 1;
        }
        shape
    }
}

fn parse_unsigned(tok: Token<'_>, what: &str) -> Result<u64> {
    tok.text.parse::<u64>().map_err(|_| {
        Error::syntax(
            tok.line,
            tok.column,
            format!("expected {what}, found `{}`", tok.text),
        )
    })
}

fn parse_u32(tok: Token<'_>, what: &str) -> Result<u32> {
    let value = parse_unsigned(tok, what)?;
    u32::try_from(value).map_err(|_| {
        Error::syntax(
            tok.line,
            tok.column,
            format!("{what} `{}` does not fit in 32 bits", tok.text),
        )
    })
}

fn parse_cost(tok: Token<'_>) -> Result<Cost> {
    let bad = |msg: String| Error::syntax(tok.line, tok.column, msg);
    let text = tok.text;
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num
            .parse()
            .map_err(|_| bad(format!("invalid cost `{text}`")))?;
        let den: i64 = den
            .parse()
            .map_err(|_| bad(format!("invalid cost `{text}`")))?;
        if den == 0 {
            return Err(bad(format!("cost `{text}` has zero denominator")));
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let whole: i64 = whole
            .parse()
            .map_err(|_| bad(format!("invalid cost `{text}`")))?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad(format!("invalid cost `{text}`")));
        }
        let scale = 10i64
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| bad(format!("cost `{text}` has too many decimals")))?;
        let frac_value: i64 = frac.parse().unwrap();
        return Ok(Ratio::new(whole * scale + frac_value, scale));
    }
    let value: i64 = text
        .parse()
        .map_err(|_| bad(format!("invalid cost `{text}`")))?;
    Ok(Cost::from_integer(value))
}

/// Parses the native multi-bin-type format, falling back to the classical
/// VBP format when the line shape identifies one.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let tokens = Tokens::new(text);
    let shape = tokens.line_shape();
    // Native: line 2 is the single integer q and line 3 carries 1+p tokens.
    // VBP: line 2 is the capacity vector (p tokens) and line 3 the single
    // integer m.  Only p = 1 makes line 2 ambiguous; line 3 settles it.
    let looks_native = match (shape.first(), shape.get(1)) {
        (Some(_), Some(1)) => shape.get(2).map_or(true, |&third| third != 1),
        (Some(_), Some(_)) => false,
        _ => true,
    };
    if looks_native {
        parse_native(Tokens::new(text))
    } else {
        parse_vbp(Tokens::new(text))
    }
}

fn parse_native(mut tokens: Tokens<'_>) -> Result<Instance> {
    let dims = parse_unsigned(tokens.next("p")?, "dimension count p")? as usize;
    if dims == 0 {
        return Err(Error::InvalidInstance("p must be at least 1".into()));
    }
    let q = parse_unsigned(tokens.next("q")?, "bin type count q")? as usize;
    let mut bins = Vec::with_capacity(q);
    for t in 1..=q {
        let cost = parse_cost(tokens.next("bin cost")?)?;
        let mut capacity = Vec::with_capacity(dims);
        for _ in 0..dims {
            capacity.push(parse_u32(tokens.next("bin capacity entry")?, "capacity")?);
        }
        bins.push(BinType {
            index: t as u32,
            capacity,
            cost,
        });
    }
    let m = parse_unsigned(tokens.next("m")?, "item type count m")? as usize;
    if m == 0 {
        return Err(Error::InvalidInstance("no items".into()));
    }
    let mut items = Vec::with_capacity(m);
    for i in 1..=m {
        let demand = parse_unsigned(tokens.next("item demand")?, "demand")?;
        let k = parse_unsigned(tokens.next("incarnation count")?, "incarnation count")? as usize;
        if k == 0 {
            return Err(Error::InvalidInstance(format!(
                "item {i} has no incarnations"
            )));
        }
        let mut incarnations = Vec::with_capacity(k);
        for j in 1..=k {
            let mut weight = Vec::with_capacity(dims);
            for _ in 0..dims {
                weight.push(parse_u32(tokens.next("incarnation weight")?, "weight")?);
            }
            incarnations.push(Incarnation {
                item: i as u32,
                variant: j as u32,
                weight,
            });
        }
        items.push(ItemType {
            index: i as u32,
            demand,
            incarnations,
        });
    }
    if let Some(extra) = tokens.remaining() {
        return Err(Error::syntax(
            extra.line,
            extra.column,
            format!("trailing input `{}`", extra.text),
        ));
    }
    Instance::new(dims, items, bins)
}

/// Parses the classical single-bin VBP format directly.
pub fn parse_vbp_instance(text: &str) -> Result<Instance> {
    parse_vbp(Tokens::new(text))
}

fn parse_vbp(mut tokens: Tokens<'_>) -> Result<Instance> {
    let dims = parse_unsigned(tokens.next("p")?, "dimension count p")? as usize;
    if dims == 0 {
        return Err(Error::InvalidInstance("p must be at least 1".into()));
    }
    let mut capacity = Vec::with_capacity(dims);
    for _ in 0..dims {
        capacity.push(parse_u32(tokens.next("capacity entry")?, "capacity")?);
    }
    let m = parse_unsigned(tokens.next("m")?, "item type count m")? as usize;
    if m == 0 {
        return Err(Error::InvalidInstance("no items".into()));
    }
    let mut items = Vec::with_capacity(m);
    for i in 1..=m {
        let mut weight = Vec::with_capacity(dims);
        for _ in 0..dims {
            weight.push(parse_u32(tokens.next("item weight")?, "weight")?);
        }
        let demand = parse_unsigned(tokens.next("item demand")?, "demand")?;
        items.push(ItemType {
            index: i as u32,
            demand,
            incarnations: vec![Incarnation {
                item: i as u32,
                variant: 1,
                weight,
            }],
        });
    }
    if let Some(extra) = tokens.remaining() {
        return Err(Error::syntax(
            extra.line,
            extra.column,
            format!("trailing input `{}`", extra.text),
        ));
    }
    Instance::new(
        dims,
        items,
        vec![BinType {
            index: 1,
            capacity,
            cost: Cost::from_integer(1),
        }],
    )
}

/// Canonical rendering in the native format.  `parse_instance` of the output
/// reproduces the instance exactly.
pub fn render_instance(instance: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", instance.dims));
    out.push_str(&format!("{}\n", instance.bins.len()));
    for bin in &instance.bins {
        out.push_str(&cost_to_string(&bin.cost));
        for c in &bin.capacity {
            out.push_str(&format!(" {c}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("{}\n", instance.items.len()));
    for item in &instance.items {
        out.push_str(&format!("{} {}\n", item.demand, item.incarnations.len()));
        for inc in &item.incarnations {
            out.push_str("  ");
            let entries: Vec<String> = inc.weight.iter().map(|w| w.to_string()).collect();
            out.push_str(&entries.join(" "));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str = "\
# two bin types, two item types
2
2
3 100 75
2 75 50
2
2 1
  75 50
1 2
  40 15
  25 25
";

    #[test]
    fn parses_native_sample() {
        let inst = parse_instance(SAMPLE).unwrap();
        assert_eq!(inst.total_items(), 3);
        assert_eq!(inst.num_items(), 2);
        assert_eq!(inst.num_bins(), 2);
        assert_eq!(inst.bin(1).capacity, vec![100, 75]);
        assert_eq!(inst.bin(1).cost, Cost::from_integer(3));
        assert_eq!(inst.weight(2, 2), &[25, 25]);
    }

    #[test]
    fn rejects_empty_item_list() {
        let err = parse_instance("1\n1\n1 10\n0\n").unwrap_err();
        assert!(err.to_string().contains("no items"));
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse_instance("2\n1\n1 10 x\n1\n1 1\n 1 1\n").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column, 6);
            }
            other => panic!("expected syntax error, got {other}"),
        }
    }

    #[test]
    fn unfittable_item_is_infeasibility_not_syntax() {
        let text = "2\n2\n1 150 75\n1 100 75\n1\n1 1\n  200 10\n";
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err}");
    }

    #[test]
    fn parses_vbp_format() {
        let text = "2\n10 8\n2\n5 3 2\n4 4 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.num_bins(), 1);
        assert_eq!(inst.bin(1).cost, Cost::from_integer(1));
        assert_eq!(inst.bin(1).capacity, vec![10, 8]);
        assert_eq!(inst.item(1).demand, 2);
        assert_eq!(inst.weight(1, 1), &[5, 3]);
    }

    #[test]
    fn parses_vbp_format_one_dim() {
        // p = 1 is the ambiguous case: the third line length decides.
        let text = "1\n10\n2\n5 2\n4 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.num_bins(), 1);
        assert_eq!(inst.num_items(), 2);
        assert_eq!(inst.item(1).demand, 2);
    }

    #[test]
    fn parses_rational_costs() {
        let text = "1\n2\n7/2 10\n2.5 8\n1\n1 1\n  3\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.bin(1).cost, Ratio::new(7, 2));
        assert_eq!(inst.bin(2).cost, Ratio::new(5, 2));
    }

    #[test]
    fn render_round_trips_sample() {
        let inst = parse_instance(SAMPLE).unwrap();
        let rendered = render_instance(&inst);
        let reparsed = parse_instance(&rendered).unwrap();
        assert_eq!(inst, reparsed);
    }
}
