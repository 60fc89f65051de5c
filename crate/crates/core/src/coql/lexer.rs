//! Hand-written lexer for COQL. Tokens carry line and column (1-based)
//! so parse errors point at the offending input.

use std::fmt;

use super::CoqlError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Dec(String),
    Str(String),
    // keywords
    From,
    Select,
    Where,
    Forall,
    If,
    Then,
    Return,
    And,
    Or,
    Not,
    As,
    This,
    Collection,
    Item,
    Double,
    Integer,
    Count,
    Sum,
    Average,
    Size,
    // punctuation and operators
    Arrow,      // ->
    BackArrow,  // <-
    Dot,        // .
    DoubleColon, // ::
    Eq,         // ==
    Ne,         // !=
    Le,         // <=
    Ge,         // >=
    Lt,         // <
    Gt,         // >
    Assign,     // =
    Plus,
    Minus,
    Star,
    Slash,
    Bar,
    Comma,
    Semi,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            TokenKind::Ident(s) => return write!(f, "identifier `{s}`"),
            TokenKind::Int(v) => return write!(f, "integer `{v}`"),
            TokenKind::Dec(v) => return write!(f, "decimal `{v}`"),
            TokenKind::Str(s) => return write!(f, "string '{s}'"),
            TokenKind::From => "FROM",
            TokenKind::Select => "SELECT",
            TokenKind::Where => "WHERE",
            TokenKind::Forall => "FORALL",
            TokenKind::If => "IF",
            TokenKind::Then => "THEN",
            TokenKind::Return => "RETURN",
            TokenKind::And => "AND",
            TokenKind::Or => "OR",
            TokenKind::Not => "NOT",
            TokenKind::As => "AS",
            TokenKind::This => "this",
            TokenKind::Collection => "Collection",
            TokenKind::Item => "Item",
            TokenKind::Double => "double",
            TokenKind::Integer => "integer",
            TokenKind::Count => "COUNT",
            TokenKind::Sum => "SUM",
            TokenKind::Average => "AVERAGE",
            TokenKind::Size => "SIZE",
            TokenKind::Arrow => "->",
            TokenKind::BackArrow => "<-",
            TokenKind::Dot => ".",
            TokenKind::DoubleColon => "::",
            TokenKind::Eq => "==",
            TokenKind::Ne => "!=",
            TokenKind::Le => "<=",
            TokenKind::Ge => ">=",
            TokenKind::Lt => "<",
            TokenKind::Gt => ">",
            TokenKind::Assign => "=",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Bar => "|",
            TokenKind::Comma => ",",
            TokenKind::Semi => ";",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::Eof => "end of input",
        };
        f.write_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub col: u32,
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "FROM" => TokenKind::From,
        "SELECT" => TokenKind::Select,
        "WHERE" => TokenKind::Where,
        "FORALL" => TokenKind::Forall,
        "IF" => TokenKind::If,
        "THEN" => TokenKind::Then,
        "RETURN" => TokenKind::Return,
        "AND" => TokenKind::And,
        "OR" => TokenKind::Or,
        "NOT" => TokenKind::Not,
        "AS" => TokenKind::As,
        "this" => TokenKind::This,
        "Collection" => TokenKind::Collection,
        "Item" => TokenKind::Item,
        "double" => TokenKind::Double,
        "integer" => TokenKind::Integer,
        "COUNT" => TokenKind::Count,
        "SUM" => TokenKind::Sum,
        "AVERAGE" => TokenKind::Average,
        "SIZE" => TokenKind::Size,
        _ => return None,
    })
}

pub fn lex(text: &str) -> Result<Vec<Token>, CoqlError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    let push = |kind: TokenKind, line: u32, col: u32, tokens: &mut Vec<Token>| {
        tokens.push(Token { kind, line, col });
    };
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let advance = |i: &mut usize, line: &mut u32, col: &mut u32| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        // line comments
        if c == '-' && i + 1 < chars.len() && chars[i + 1] == '-' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            let kind = keyword(&word).unwrap_or(TokenKind::Ident(word));
            push(kind, tline, tcol, &mut tokens);
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col);
            }
            let mut decimal = false;
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                decimal = true;
                advance(&mut i, &mut line, &mut col);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col);
                }
            }
            let word: String = chars[start..i].iter().collect();
            if decimal {
                push(TokenKind::Dec(word), tline, tcol, &mut tokens);
            } else {
                let value: i64 = word.parse().map_err(|_| CoqlError::Lex {
                    line: tline,
                    col: tcol,
                    message: format!("integer literal `{word}` is out of range"),
                })?;
                push(TokenKind::Int(value), tline, tcol, &mut tokens);
            }
            continue;
        }
        if c == '\'' || c == '"' {
            let quote = c;
            advance(&mut i, &mut line, &mut col);
            let mut value = String::new();
            let mut closed = false;
            while i < chars.len() {
                let ch = chars[i];
                if ch == '\\' && i + 1 < chars.len() {
                    advance(&mut i, &mut line, &mut col);
                    value.push(chars[i]);
                    advance(&mut i, &mut line, &mut col);
                    continue;
                }
                if ch == quote {
                    advance(&mut i, &mut line, &mut col);
                    closed = true;
                    break;
                }
                value.push(ch);
                advance(&mut i, &mut line, &mut col);
            }
            if !closed {
                return Err(CoqlError::Lex {
                    line: tline,
                    col: tcol,
                    message: "unterminated string literal".to_string(),
                });
            }
            push(TokenKind::Str(value), tline, tcol, &mut tokens);
            continue;
        }
        let two: Option<TokenKind> = if i + 1 < chars.len() {
            match (c, chars[i + 1]) {
                ('-', '>') => Some(TokenKind::Arrow),
                ('<', '-') => Some(TokenKind::BackArrow),
                (':', ':') => Some(TokenKind::DoubleColon),
                ('=', '=') => Some(TokenKind::Eq),
                ('!', '=') => Some(TokenKind::Ne),
                ('<', '=') => Some(TokenKind::Le),
                ('>', '=') => Some(TokenKind::Ge),
                _ => None,
            }
        } else {
            None
        };
        if let Some(kind) = two {
            advance(&mut i, &mut line, &mut col);
            advance(&mut i, &mut line, &mut col);
            push(kind, tline, tcol, &mut tokens);
            continue;
        }
        let single = match c {
            '.' => TokenKind::Dot,
            '<' => TokenKind::Lt,
            '>' => TokenKind::Gt,
            '=' => TokenKind::Assign,
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '|' => TokenKind::Bar,
            ',' => TokenKind::Comma,
            ';' => TokenKind::Semi,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            other => {
                return Err(CoqlError::Lex {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        advance(&mut i, &mut line, &mut col);
        push(single, tline, tcol, &mut tokens);
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        line,
        col,
    });
    Ok(tokens)
}
