use super::token::{Keyword, Op, Pos, Punct, Token, TokenKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{pos}: {message}")]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    idx: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).map(|&(_, c)| c)
    }

    fn peek_at(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.idx + ahead).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.idx).map_or(self.src.len(), |&(o, _)| o)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn error(&self, pos: Pos, message: impl Into<String>) -> LexError {
        LexError { pos, message: message.into() }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn number(&mut self, start: usize, pos: Pos) -> Result<TokenKind, LexError> {
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        let is_real = self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit());
        if is_real {
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
        }
        let text = &self.src[start..self.offset()];
        if is_real {
            text.parse::<f64>()
                .map(TokenKind::Real)
                .map_err(|_| self.error(pos, format!("malformed real literal `{text}`")))
        } else {
            text.parse::<i64>()
                .map(TokenKind::Int)
                .map_err(|_| self.error(pos, format!("integer literal `{text}` out of range")))
        }
    }

    fn string(&mut self, pos: Pos) -> Result<TokenKind, LexError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.error(pos, "unterminated string literal")),
                Some('"') => return Ok(TokenKind::Str(out)),
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some('\\') => out.push('\\'),
                    Some('"') => out.push('"'),
                    _ => return Err(self.error(pos, "invalid escape in string literal")),
                },
                Some(c) => out.push(c),
            }
        }
    }

    fn operator(&mut self, c: char, pos: Pos) -> Result<TokenKind, LexError> {
        let next = self.peek_at(1);
        let (kind, len) = match (c, next) {
            (':', Some('=')) => (TokenKind::Op(Op::Assign), 2),
            (':', Some(':')) => (TokenKind::Op(Op::ColonColon), 2),
            (':', _) => (TokenKind::Op(Op::Colon), 1),
            ('<', Some('=')) => (TokenKind::Op(Op::Le), 2),
            ('<', _) => (TokenKind::Op(Op::Lt), 1),
            ('>', Some('=')) => (TokenKind::Op(Op::Ge), 2),
            ('>', _) => (TokenKind::Op(Op::Gt), 1),
            ('=', Some('=')) => (TokenKind::Op(Op::EqEq), 2),
            ('!', Some('=')) => (TokenKind::Op(Op::Ne), 2),
            ('+', _) => (TokenKind::Op(Op::Plus), 1),
            ('-', _) => (TokenKind::Op(Op::Minus), 1),
            ('*', _) => (TokenKind::Op(Op::Star), 1),
            ('/', _) => (TokenKind::Op(Op::Slash), 1),
            (';', _) => (TokenKind::Punct(Punct::Semi), 1),
            (',', _) => (TokenKind::Punct(Punct::Comma), 1),
            ('.', _) => (TokenKind::Punct(Punct::Dot), 1),
            ('(', _) => (TokenKind::Punct(Punct::LParen), 1),
            (')', _) => (TokenKind::Punct(Punct::RParen), 1),
            ('[', _) => (TokenKind::Punct(Punct::LBracket), 1),
            (']', _) => (TokenKind::Punct(Punct::RBracket), 1),
            ('{', _) => (TokenKind::Punct(Punct::LBrace), 1),
            ('}', _) => (TokenKind::Punct(Punct::RBrace), 1),
            _ => return Err(self.error(pos, format!("unexpected character `{c}`"))),
        };
        for _ in 0..len {
            self.bump();
        }
        Ok(kind)
    }
}

/// Split source text into tokens, terminated by a single [`TokenKind::Eof`].
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lx = Lexer { src: source, chars: source.char_indices().collect(), idx: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        lx.skip_trivia();
        let pos = lx.pos();
        let start = lx.offset();
        let Some(c) = lx.peek() else {
            out.push(Token { kind: TokenKind::Eof, lexeme: String::new(), pos });
            return Ok(out);
        };
        let kind = if c.is_alphabetic() || c == '_' {
            while lx.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                lx.bump();
            }
            let word = &source[start..lx.offset()];
            match Keyword::from_ident(word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            lx.number(start, pos)?
        } else if c == '"' {
            lx.string(pos)?
        } else {
            lx.operator(c, pos)?
        };
        out.push(Token { kind, lexeme: source[start..lx.offset()].to_string(), pos });
    }
}
