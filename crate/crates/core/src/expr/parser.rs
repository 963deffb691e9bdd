use super::{BinOp, Expr, ExprError, Func, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| syntax(tline, tcol, format!("malformed number `{text}`")))?;
            Tok::Num(v)
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err(syntax(tline, tcol, format!("unexpected character `{c}`"))),
            }
        };
        col += i - start;
        out.push(Token {
            tok,
            line: tline,
            column: tcol,
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek().tok == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    let func = Func::from_name(&name).ok_or(ExprError::UnknownFunction {
                        name,
                        line: t.line,
                        column: t.column,
                    })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                Ok(match name.as_str() {
                    "x" => Expr::Var(Var::X),
                    "y1" => Expr::Var(Var::Y1),
                    "y2" => Expr::Var(Var::Y2),
                    _ => Expr::Param(name),
                })
            }
            Tok::End => Err(syntax(t.line, t.column, "unexpected end of input")),
            other => Err(syntax(t.line, t.column, format!("unexpected token {other:?}"))),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        let t = self.bump();
        match t.tok {
            Tok::RParen => Ok(()),
            _ => Err(syntax(t.line, t.column, "expected `)`")),
        }
    }
}

/// Parses one expression; positions in errors are 1-based.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    if p.peek().tok == Tok::End {
        let t = p.peek();
        return Err(syntax(t.line, t.column, "empty expression"));
    }
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.line, t.column, format!("unexpected trailing {:?}", t.tok)));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    fn param(s: &str) -> Expr {
        Expr::Param(s.into())
    }

    #[test]
    fn catalytic_rhs_shape() {
        let y1 = Expr::Var(Var::Y1);
        let y2 = Expr::Var(Var::Y2);
        let want = bin(
            BinOp::Add,
            bin(BinOp::Mul, param("a"), bin(BinOp::Pow, y1.clone(), Expr::Num(2.0))),
            bin(BinOp::Mul, bin(BinOp::Mul, param("b"), y1), y2),
        );
        assert_eq!(p("a*y1^2 + b*y1*y2"), want);
    }

    #[test]
    fn exponential_rhs_has_two_exp_nodes() {
        let e = p("-8*exp(y1) - 16*exp(-y2/2)");
        fn count(e: &Expr) -> usize {
            match e {
                Expr::Call(Func::Exp, a) => 1 + count(a),
                Expr::Call(_, a) | Expr::Neg(a) => count(a),
                Expr::Bin(_, l, r) => count(l) + count(r),
                _ => 0,
            }
        }
        assert_eq!(count(&e), 2);
        assert!(matches!(e, Expr::Bin(BinOp::Sub, ..)));
    }

    #[test]
    fn michaelis_menten_division() {
        assert_eq!(
            p("y1/(l1+y1)"),
            bin(
                BinOp::Div,
                Expr::Var(Var::Y1),
                bin(BinOp::Add, param("l1"), Expr::Var(Var::Y1))
            )
        );
    }

    #[test]
    fn precedence_rules() {
        // ^ binds tighter than unary minus
        assert_eq!(p("-x^2"), Expr::Neg(Box::new(bin(BinOp::Pow, Expr::Var(Var::X), Expr::Num(2.0)))));
        // ^ is right associative
        assert_eq!(
            p("2^3^2"),
            bin(BinOp::Pow, Expr::Num(2.0), bin(BinOp::Pow, Expr::Num(3.0), Expr::Num(2.0)))
        );
        // - and / are left associative
        assert_eq!(
            p("a-b-c"),
            bin(BinOp::Sub, bin(BinOp::Sub, param("a"), param("b")), param("c"))
        );
        assert_eq!(
            p("a/b/c"),
            bin(BinOp::Div, bin(BinOp::Div, param("a"), param("b")), param("c"))
        );
        assert_eq!(p("1.5e-3"), Expr::Num(1.5e-3));
        assert_eq!(p(".5"), Expr::Num(0.5));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("y1 +\n  * 2").unwrap_err() {
            ExprError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 3)),
            e => panic!("{e}"),
        }
        match parse("(y1 + 2").unwrap_err() {
            ExprError::Syntax { line, column, .. } => assert_eq!((line, column), (1, 8)),
            e => panic!("{e}"),
        }
        assert!(matches!(parse(""), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("y1 # 2"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("y1 y2"), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn unknown_function() {
        assert_eq!(
            parse("1 + sin(x)").unwrap_err(),
            ExprError::UnknownFunction {
                name: "sin".into(),
                line: 1,
                column: 5
            }
        );
    }
}
