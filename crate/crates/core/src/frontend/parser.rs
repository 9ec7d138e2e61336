//! Recursive descent parser with precedence climbing for expressions.

use super::ast::*;
use super::token::{Keyword, Op, Pos, Punct, Token, TokenKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{pos}: expected {expected}, found {found}")]
pub struct ParseError {
    pub pos: Pos,
    pub expected: String,
    pub found: String,
}

pub fn parse(tokens: &[Token]) -> Result<Program, ParseError> {
    let mut p = Parser { tokens, pos: 0 };
    let stmts = p.stmt_list(false)?;
    p.expect_eof()?;
    Ok(Program { stmts })
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn current(&self) -> &'t Token {
        let last = self.tokens.len().saturating_sub(1);
        &self.tokens[self.pos.min(last)]
    }

    fn peek(&self) -> &'t TokenKind {
        &self.current().kind
    }

    fn peek_at(&self, ahead: usize) -> &'t TokenKind {
        let last = self.tokens.len().saturating_sub(1);
        &self.tokens[(self.pos + ahead).min(last)].kind
    }

    fn here(&self) -> Pos {
        self.current().pos
    }

    fn advance(&mut self) -> &'t Token {
        let tok = self.current();
        if self.pos < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, expected: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.here(), expected: expected.into(), found: self.peek().to_string() })
    }

    fn is_punct(&self, p: Punct) -> bool {
        matches!(self.peek(), TokenKind::Punct(q) if *q == p)
    }

    fn is_op(&self, o: Op) -> bool {
        matches!(self.peek(), TokenKind::Op(q) if *q == o)
    }

    fn is_keyword(&self, k: Keyword) -> bool {
        matches!(self.peek(), TokenKind::Keyword(q) if *q == k)
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.is_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_op(&mut self, o: Op) -> bool {
        if self.is_op(o) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: Punct) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(format!("`{}`", p.as_char()))
        }
    }

    fn expect_op(&mut self, o: Op) -> Result<(), ParseError> {
        if self.eat_op(o) {
            Ok(())
        } else {
            self.error(format!("`{}`", o.as_str()))
        }
    }

    fn expect_keyword(&mut self, k: Keyword) -> Result<(), ParseError> {
        if self.is_keyword(k) {
            self.advance();
            Ok(())
        } else {
            self.error(format!("`{}`", k.as_str()))
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            TokenKind::Ident(name) => {
                self.advance();
                Ok(name.clone())
            }
            _ => self.error("identifier"),
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            TokenKind::Eof => Ok(()),
            _ => self.error("statement or end of input"),
        }
    }

    /// Statements up to `}` (when `in_block`) or end of input.
    ///
    /// `;` separates statements; it may be omitted before `}` and after a
    /// statement that itself ends in a braced block.
    fn stmt_list(&mut self, in_block: bool) -> Result<Vec<Stmt>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.eat_punct(Punct::Semi) {}
            if matches!(self.peek(), TokenKind::Eof) || (in_block && self.is_punct(Punct::RBrace)) {
                return Ok(out);
            }
            let ended_with_block = self.statement(&mut out)?;
            if self.eat_punct(Punct::Semi)
                || ended_with_block
                || matches!(self.peek(), TokenKind::Eof)
                || (in_block && self.is_punct(Punct::RBrace))
            {
                continue;
            }
            return self.error("`;`");
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect_punct(Punct::LBrace)?;
        let body = self.stmt_list(true)?;
        self.expect_punct(Punct::RBrace)?;
        Ok(body)
    }

    /// Parse one statement into `out`; returns whether it ended with `}`.
    fn statement(&mut self, out: &mut Vec<Stmt>) -> Result<bool, ParseError> {
        let pos = self.here();
        match self.peek() {
            TokenKind::Keyword(Keyword::Var) => {
                self.advance();
                let mut names = vec![(self.here(), self.expect_ident()?)];
                while self.eat_punct(Punct::Comma) {
                    names.push((self.here(), self.expect_ident()?));
                }
                let ty = if self.eat_op(Op::Colon) { Some(self.type_expr()?) } else { None };
                let init = if self.eat_op(Op::Assign) { Some(self.expr()?) } else { None };
                for (npos, name) in names {
                    let kind = StmtKind::VarDecl { name, ty: ty.clone(), init: init.clone() };
                    out.push(Stmt { kind, pos: npos });
                }
                Ok(false)
            }
            TokenKind::Keyword(Keyword::For) => {
                self.advance();
                let var = self.expect_ident()?;
                self.expect_keyword(Keyword::From)?;
                let from = self.expr()?;
                self.expect_keyword(Keyword::To)?;
                let to = self.expr()?;
                let (body, braced) = if self.is_punct(Punct::LBrace) {
                    (self.block()?, true)
                } else {
                    let mut body = Vec::new();
                    let braced = self.statement(&mut body)?;
                    (body, braced)
                };
                out.push(Stmt { kind: StmtKind::For { var, from, to, body }, pos });
                Ok(braced)
            }
            TokenKind::Keyword(Keyword::Proc) => {
                self.advance();
                let rank = self.expr()?;
                let body = self.block()?;
                out.push(Stmt { kind: StmtKind::Proc { rank, body }, pos });
                Ok(true)
            }
            TokenKind::Keyword(Keyword::Function) => {
                self.advance();
                let name = self.expect_ident()?;
                self.expect_punct(Punct::LParen)?;
                let mut params = Vec::new();
                if !self.is_punct(Punct::RParen) {
                    loop {
                        let ppos = self.here();
                        let pname = self.expect_ident()?;
                        self.expect_op(Op::Colon)?;
                        let ty = self.type_expr()?;
                        params.push(Param { name: pname, ty, pos: ppos });
                        if !self.eat_punct(Punct::Comma) {
                            break;
                        }
                    }
                }
                self.expect_punct(Punct::RParen)?;
                let body = self.block()?;
                out.push(Stmt { kind: StmtKind::Function { name, params, body }, pos });
                Ok(true)
            }
            TokenKind::Keyword(Keyword::Sync) => {
                self.advance();
                let var = match self.peek() {
                    TokenKind::Ident(name) => {
                        self.advance();
                        Some(name.clone())
                    }
                    _ => None,
                };
                out.push(Stmt { kind: StmtKind::Sync { var }, pos });
                Ok(false)
            }
            TokenKind::Ident(name) => {
                let name = name.clone();
                if matches!(self.peek_at(1), TokenKind::Punct(Punct::LParen)) {
                    self.advance();
                    let args = self.call_args()?;
                    out.push(Stmt { kind: StmtKind::Call { name, args }, pos });
                    return Ok(false);
                }
                self.advance();
                let mut indices = Vec::new();
                while self.eat_punct(Punct::LBracket) {
                    indices.push(self.expr()?);
                    self.expect_punct(Punct::RBracket)?;
                }
                self.expect_op(Op::Assign)?;
                let value = self.expr()?;
                let target = LValue { name, indices, pos };
                out.push(Stmt { kind: StmtKind::Assign { target, value }, pos });
                Ok(false)
            }
            _ => self.error("statement"),
        }
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_punct(Punct::LParen)?;
        let mut args = Vec::new();
        if !self.is_punct(Punct::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        self.expect_punct(Punct::RParen)?;
        Ok(args)
    }

    pub(crate) fn type_expr(&mut self) -> Result<TypeExpr, ParseError> {
        let pos = self.here();
        let mut apps = vec![self.type_app()?];
        while self.eat_op(Op::ColonColon) {
            apps.push(self.type_app()?);
        }
        Ok(TypeExpr { apps, pos })
    }

    fn type_app(&mut self) -> Result<TypeApp, ParseError> {
        let pos = self.here();
        let name = self.expect_ident()?;
        let args = if self.eat_punct(Punct::LBracket) {
            let mut args = Vec::new();
            if !self.is_punct(Punct::RBracket) {
                loop {
                    args.push(self.type_arg()?);
                    if !self.eat_punct(Punct::Comma) {
                        break;
                    }
                }
            }
            self.expect_punct(Punct::RBracket)?;
            Some(args)
        } else {
            None
        };
        Ok(TypeApp { name, args, pos })
    }

    fn type_arg(&mut self) -> Result<TypeArg, ParseError> {
        let nested = matches!(self.peek(), TokenKind::Ident(_))
            && matches!(self.peek_at(1), TokenKind::Punct(Punct::LBracket) | TokenKind::Op(Op::ColonColon));
        if nested {
            Ok(TypeArg::Type(self.type_expr()?))
        } else {
            Ok(TypeArg::Expr(self.expr()?))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn peek_binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            TokenKind::Op(Op::Plus) => BinOp::Add,
            TokenKind::Op(Op::Minus) => BinOp::Sub,
            TokenKind::Op(Op::Star) => BinOp::Mul,
            TokenKind::Op(Op::Slash) => BinOp::Div,
            TokenKind::Op(Op::Lt) => BinOp::Lt,
            TokenKind::Op(Op::Le) => BinOp::Le,
            TokenKind::Op(Op::Gt) => BinOp::Gt,
            TokenKind::Op(Op::Ge) => BinOp::Ge,
            TokenKind::Op(Op::EqEq) => BinOp::Eq,
            TokenKind::Op(Op::Ne) => BinOp::Ne,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek_binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            let pos = lhs.pos;
            self.advance();
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        if self.eat_op(Op::Minus) {
            let inner = self.unary()?;
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), pos));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.peek() {
            TokenKind::Int(v) => {
                let v = *v;
                self.advance();
                Ok(Expr::new(ExprKind::Int(v), pos))
            }
            TokenKind::Real(v) => {
                let v = *v;
                self.advance();
                Ok(Expr::new(ExprKind::Real(v), pos))
            }
            TokenKind::Str(s) => {
                let s = s.clone();
                self.advance();
                Ok(Expr::new(ExprKind::Str(s), pos))
            }
            TokenKind::Punct(Punct::LParen) => {
                self.advance();
                let inner = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                let name = name.clone();
                self.advance();
                self.postfix(name, pos)
            }
            _ => self.error("expression"),
        }
    }

    fn postfix(&mut self, name: String, pos: Pos) -> Result<Expr, ParseError> {
        if self.is_punct(Punct::LParen) {
            let args = self.call_args()?;
            return Ok(Expr::new(ExprKind::Call(name, args), pos));
        }
        if self.eat_punct(Punct::Dot) {
            let member_pos = self.here();
            let member = self.expect_ident()?;
            return match member.as_str() {
                "localblocks" => Ok(Expr::new(ExprKind::Accessor(name, Accessor::LocalBlocks), pos)),
                "localblockid" => {
                    self.expect_punct(Punct::LBracket)?;
                    let j = self.expr()?;
                    self.expect_punct(Punct::RBracket)?;
                    Ok(Expr::new(ExprKind::Accessor(name, Accessor::LocalBlockId(Box::new(j))), pos))
                }
                _ => Err(ParseError {
                    pos: member_pos,
                    expected: "`localblocks` or `localblockid`".into(),
                    found: format!("identifier `{member}`"),
                }),
            };
        }
        let mut indices = Vec::new();
        while self.eat_punct(Punct::LBracket) {
            indices.push(self.expr()?);
            self.expect_punct(Punct::RBracket)?;
        }
        if indices.len() == 1 && self.is_punct(Punct::Dot) {
            self.advance();
            let member_pos = self.here();
            let member = self.expect_ident()?;
            let bid = Box::new(indices.pop().unwrap());
            return match member.as_str() {
                "low" => Ok(Expr::new(ExprKind::Accessor(name, Accessor::Low(bid)), pos)),
                "high" => Ok(Expr::new(ExprKind::Accessor(name, Accessor::High(bid)), pos)),
                _ => Err(ParseError {
                    pos: member_pos,
                    expected: "`low` or `high`".into(),
                    found: format!("identifier `{member}`"),
                }),
            };
        }
        if indices.is_empty() {
            Ok(Expr::new(ExprKind::Var(name), pos))
        } else {
            Ok(Expr::new(ExprKind::Index(name, indices), pos))
        }
    }
}
