use super::{Formula, Prop};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Bang,
    Tilde,
    Amp,
    Pipe,
    At,
    Dot,
    End,
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub(crate) tok: Tok,
    pub(crate) line: usize,
    pub(crate) col: usize,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, k) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    s.push(d);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Ident(s),
                line: l,
                col: k,
            });
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '!' => Tok::Bang,
            '~' => Tok::Tilde,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '@' => Tok::At,
            '.' => Tok::Dot,
            other => return Err(Error::syntax(l, k, format!("unexpected character `{other}`"))),
        };
        chars.next();
        col += 1;
        out.push(Spanned { tok, line: l, col: k });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["X", "F", "G", "U", "R"];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, off: usize) -> &Tok {
        let i = (self.pos + off).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::syntax(s.line, s.col, msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn split(&mut self) -> Result<Formula> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::split(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut lhs = self.untilrel()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.untilrel()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn untilrel(&mut self) -> Result<Formula> {
        let mut operands = vec![self.unary()?];
        let mut op: Option<&'static str> = None;
        loop {
            let this = if self.is_kw("U") {
                "U"
            } else if self.is_kw("R") {
                "R"
            } else {
                break;
            };
            if op.is_some_and(|o| o != this) {
                return Err(self.err("U and R cannot be mixed without parentheses"));
            }
            op = Some(this);
            self.bump();
            operands.push(self.unary()?);
        }
        let mut acc = operands.pop().expect("at least one operand");
        while let Some(lhs) = operands.pop() {
            acc = match op {
                Some("U") => Formula::until(lhs, acc),
                _ => Formula::release(lhs, acc),
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "X" => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Tok::Ident(s) if s == "F" => {
                self.bump();
                Ok(Formula::eventually(self.unary()?))
            }
            Tok::Ident(s) if s == "G" => {
                self.bump();
                Ok(Formula::globally(self.unary()?))
            }
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Bang => {
                self.bump();
                match self.peek().clone() {
                    Tok::Ident(s) if !is_keyword(&s) && !self.is_call() => {
                        self.bump();
                        Ok(Formula::NegLit(Prop::raw(s)))
                    }
                    _ => Err(self.err("`!` must be followed directly by a proposition")),
                }
            }
            _ => self.atom(),
        }
    }

    /// `dep(` starts a dependence atom; any other identifier is a proposition.
    fn is_call(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == "dep") && *self.peek_at(1) == Tok::LParen
    }

    fn ident_list(&mut self, stop: &[Tok]) -> Result<Vec<Prop>> {
        let mut out = Vec::new();
        if stop.contains(self.peek()) {
            return Ok(out);
        }
        loop {
            match self.peek().clone() {
                Tok::Ident(s) if !is_keyword(&s) => {
                    self.bump();
                    out.push(Prop::raw(s));
                }
                _ => return Err(self.err("expected a proposition name")),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.split()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::At => {
                self.bump();
                let name = match self.peek().clone() {
                    Tok::Ident(s) => s,
                    _ => return Err(self.err("expected an atom name after `@`")),
                };
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let args = self.ident_list(&[Tok::RParen])?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::Gen { name, args })
            }
            Tok::Ident(_) if self.is_call() => {
                self.bump();
                self.bump();
                let determinants = self.ident_list(&[Tok::Semi])?;
                self.expect(Tok::Semi, "`;` in dependence atom")?;
                if *self.peek() == Tok::RParen {
                    return Err(self.err("dependence atom needs a determined proposition"));
                }
                let determined = self.ident_list(&[Tok::RParen])?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::Dep {
                    determinants,
                    determined,
                })
            }
            Tok::Ident(s) if is_keyword(&s) => {
                Err(self.err(format!("`{s}` is an operator and needs an operand")))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Formula::Lit(Prop::raw(s)))
            }
            Tok::End => Err(self.err("unexpected end of formula")),
            other => Err(self.err(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.split()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

// Precedence levels, loosest first.
const SPLIT: u8 = 0;
const CONJ: u8 = 1;
const TEMP: u8 = 2;
const UNARY: u8 = 3;

pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    render(f, SPLIT, &mut out);
    out
}

fn join(props: &[Prop]) -> String {
    props
        .iter()
        .map(Prop::as_str)
        .collect::<Vec<_>>()
        .join(",")
}

fn render(f: &Formula, ctx: u8, out: &mut String) {
    let own = match f {
        Formula::Split(..) => SPLIT,
        Formula::And(..) => CONJ,
        Formula::Until(..) | Formula::Release(..) => TEMP,
        _ => UNARY,
    };
    let paren = own < ctx;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Lit(p) => out.push_str(p.as_str()),
        Formula::NegLit(p) => {
            out.push('!');
            out.push_str(p.as_str());
        }
        Formula::Split(a, b) => {
            render(a, SPLIT, out);
            out.push_str(" | ");
            render(b, CONJ, out);
        }
        Formula::And(a, b) => {
            render(a, CONJ, out);
            out.push_str(" & ");
            render(b, TEMP, out);
        }
        Formula::Until(a, b) | Formula::Release(a, b) => {
            let is_until = matches!(f, Formula::Until(..));
            render(a, UNARY, out);
            out.push_str(if is_until { " U " } else { " R " });
            // A right operand of the other kind would mix U and R.
            let mixes = if is_until {
                matches!(**b, Formula::Release(..))
            } else {
                matches!(**b, Formula::Until(..))
            };
            render(b, if mixes { UNARY } else { TEMP }, out);
        }
        Formula::Next(a) => {
            out.push_str("X ");
            render(a, UNARY, out);
        }
        Formula::Eventually(a) => {
            out.push_str("F ");
            render(a, UNARY, out);
        }
        Formula::Globally(a) => {
            out.push_str("G ");
            render(a, UNARY, out);
        }
        Formula::Not(a) => {
            out.push('~');
            render(a, UNARY, out);
        }
        Formula::Dep {
            determinants,
            determined,
        } => {
            out.push_str(&format!("dep({};{})", join(determinants), join(determined)));
        }
        Formula::Gen { name, args } => {
            out.push_str(&format!("@{name}({})", join(args)));
        }
    }
    if paren {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn split_keeps_both_disjuncts() {
        let f = p("F p | F p");
        assert_eq!(
            f,
            Formula::split(
                Formula::eventually(Formula::lit("p")),
                Formula::eventually(Formula::lit("p"))
            )
        );
    }

    #[test]
    fn dep_atoms() {
        assert_eq!(
            p("dep(i1,i2;o1)"),
            Formula::Dep {
                determinants: vec![Prop::raw("i1".into()), Prop::raw("i2".into())],
                determined: vec![Prop::raw("o1".into())],
            }
        );
        assert_eq!(
            p("dep(;p)"),
            Formula::dep(vec![], vec![Prop::raw("p".into())])
        );
        assert!(parse_formula("dep(p;)").is_err());
        // `dep` alone is an ordinary proposition.
        assert_eq!(p("dep & q"), Formula::and(Formula::lit("dep"), Formula::lit("q")));
    }

    #[test]
    fn precedence() {
        assert_eq!(
            p("a | b & c U d"),
            Formula::split(
                Formula::lit("a"),
                Formula::and(
                    Formula::lit("b"),
                    Formula::until(Formula::lit("c"), Formula::lit("d"))
                )
            )
        );
        assert_eq!(
            p("a U b U c"),
            Formula::until(
                Formula::lit("a"),
                Formula::until(Formula::lit("b"), Formula::lit("c"))
            )
        );
        assert_eq!(
            p("X a U b"),
            Formula::until(Formula::next(Formula::lit("a")), Formula::lit("b"))
        );
        assert_eq!(
            p("a | b | c"),
            Formula::split(
                Formula::split(Formula::lit("a"), Formula::lit("b")),
                Formula::lit("c")
            )
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_formula("a U b R c") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 7)),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("!(p)").is_err());
        assert!(parse_formula("!!p").is_err());
        assert!(parse_formula("p &").is_err());
        assert!(parse_formula("(p").is_err());
        assert!(parse_formula("p q").is_err());
        assert!(parse_formula("F").is_err());
        match parse_formula("p &\n  # q") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rendering() {
        assert_eq!(render_formula(&p("F p")), "F p");
        assert_eq!(render_formula(&p("~(p & !p)")), "~(p & !p)");
        assert_eq!(render_formula(&p("(a U b) U c")), "(a U b) U c");
        assert_eq!(render_formula(&p("a U (b R c)")), "a U (b R c)");
        assert_eq!(render_formula(&p("a & (b | c)")), "a & (b | c)");
        assert_eq!(render_formula(&p("@c(a, b) | dep(;p)")), "@c(a,b) | dep(;p)");
    }

    #[test]
    fn round_trip_handles_nesting() {
        for s in [
            "a | (b | c)",
            "(a & b) & c",
            "a & (b & c)",
            "X (a | b)",
            "~~a",
            "G (a R (b U c))",
            "(a R b) U c",
        ] {
            let f = p(s);
            assert_eq!(p(&render_formula(&f)), f, "{s}");
        }
    }
}
