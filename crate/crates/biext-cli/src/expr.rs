//! Tensor/quotient expressions for the grprofile subcommand:
//!
//!   expr := NAME
//!         | tensor(expr, expr, ...)
//!         | quot(expr, K)           -- quotient by W_{-K}
//!         | sum(expr, expr, ...)
//!         | dual(expr)
//!         | copies(expr, Z)         -- tensor with the weight-0 motive ℤ^Z

use biext::hodge::{direct_sum, quotient_by_weight, tensor_many, Mhs};
use biext::motives::{cartier_dual, tensor_weight0};

use crate::format::Loaded;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Name(String),
    Number(i64),
    Open,
    Close,
    Comma,
}

fn tokenize(input: &str) -> Result<Vec<Token>, CliError> {
    let mut tokens = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            '(' => {
                tokens.push(Token::Open);
                chars.next();
            }
            ')' => {
                tokens.push(Token::Close);
                chars.next();
            }
            ',' => {
                tokens.push(Token::Comma);
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            c if c.is_ascii_digit() || c == '-' => {
                let mut j = i;
                chars.next();
                while let Some(&(k, c2)) = chars.peek() {
                    if c2.is_ascii_digit() {
                        j = k;
                        chars.next();
                    } else {
                        break;
                    }
                }
                let text = &input[i..=j];
                let value = text
                    .parse()
                    .map_err(|_| CliError::input(format!("bad number {text:?} in expression")))?;
                tokens.push(Token::Number(value));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut j = i;
                chars.next();
                while let Some(&(k, c2)) = chars.peek() {
                    if c2.is_alphanumeric() || c2 == '_' {
                        j = k;
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Name(input[i..=j].to_string()));
            }
            other => {
                return Err(CliError::input(format!("unexpected {other:?} in expression")));
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    loaded: &'a Loaded,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Token) -> Result<(), CliError> {
        match self.next() {
            Some(found) if found == t => Ok(()),
            other => Err(CliError::input(format!("expected {t:?}, found {other:?}"))),
        }
    }

    fn number(&mut self) -> Result<i64, CliError> {
        match self.next() {
            Some(Token::Number(n)) => Ok(n),
            other => Err(CliError::input(format!("expected a number, found {other:?}"))),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Mhs>, CliError> {
        self.expect(Token::Open)?;
        let mut args = vec![self.expr()?];
        while self.peek() == Some(&Token::Comma) {
            self.next();
            args.push(self.expr()?);
        }
        self.expect(Token::Close)?;
        Ok(args)
    }

    fn expr(&mut self) -> Result<Mhs, CliError> {
        let name = match self.next() {
            Some(Token::Name(n)) => n,
            other => return Err(CliError::input(format!("expected a name, found {other:?}"))),
        };
        match name.as_str() {
            "tensor" => {
                let args = self.arguments()?;
                tensor_many(&args).map_err(CliError::computation_from)
            }
            "sum" => {
                let args = self.arguments()?;
                direct_sum(self.loaded.ctx, &args).map_err(CliError::computation_from)
            }
            "dual" => {
                let args = self.arguments()?;
                let [arg] = args.as_slice() else {
                    return Err(CliError::input("dual takes exactly one argument".into()));
                };
                cartier_dual(arg).map_err(CliError::computation_from)
            }
            "quot" => {
                self.expect(Token::Open)?;
                let inner = self.expr()?;
                self.expect(Token::Comma)?;
                let k = self.number()?;
                self.expect(Token::Close)?;
                quotient_by_weight(&inner, k).map_err(CliError::computation_from)
            }
            "copies" => {
                self.expect(Token::Open)?;
                let inner = self.expr()?;
                self.expect(Token::Comma)?;
                let z = self.number()?;
                self.expect(Token::Close)?;
                if z < 0 {
                    return Err(CliError::input("copies takes a non-negative count".into()));
                }
                Ok(tensor_weight0(&inner, z as usize))
            }
            _ => self.loaded.motive(&name).cloned(),
        }
    }
}

pub fn evaluate(input: &str, loaded: &Loaded) -> Result<Mhs, CliError> {
    let mut parser = Parser { tokens: tokenize(input)?, pos: 0, loaded };
    let result = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(CliError::input("trailing tokens in expression".into()));
    }
    Ok(result)
}
