//! Syntax tree for meshlite programs.
//!
//! Positions are carried on every statement and expression so later passes
//! can report `file:line:col` diagnostics.

use super::token::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => 1,
            BinOp::Add | BinOp::Sub => 2,
            BinOp::Mul | BinOp::Div => 3,
        }
    }
}

/// The four block accessors on partitioned arrays.
#[derive(Debug, Clone, PartialEq)]
pub enum Accessor {
    /// `A.localblocks`
    LocalBlocks,
    /// `A.localblockid[j]`
    LocalBlockId(Box<Expr>),
    /// `A[bid].low`
    Low(Box<Expr>),
    /// `A[bid].high`
    High(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Real(f64),
    Str(String),
    Var(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    /// `name[i][j]...`, at least one index.
    Index(String, Vec<Expr>),
    Accessor(String, Accessor),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Self { kind, pos }
    }
}

/// One argument of a type constructor application.
#[derive(Debug, Clone, PartialEq)]
pub enum TypeArg {
    Expr(Expr),
    Type(TypeExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeApp {
    pub name: String,
    /// `None` for a bare name (`Int`), `Some` for a bracketed list (`row[]`).
    pub args: Option<Vec<TypeArg>>,
    pub pos: Pos,
}

/// A `::`-joined sequence of constructor applications, leftmost first.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeExpr {
    pub apps: Vec<TypeApp>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LValue {
    pub name: String,
    pub indices: Vec<Expr>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: TypeExpr,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    VarDecl { name: String, ty: Option<TypeExpr>, init: Option<Expr> },
    Assign { target: LValue, value: Expr },
    For { var: String, from: Expr, to: Expr, body: Vec<Stmt> },
    Proc { rank: Expr, body: Vec<Stmt> },
    Call { name: String, args: Vec<Expr> },
    Function { name: String, params: Vec<Param>, body: Vec<Stmt> },
    Sync { var: Option<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub stmts: Vec<Stmt>,
}

impl Program {
    /// Top-level function definitions, in source order.
    pub fn functions(&self) -> impl Iterator<Item = (&str, &[Param], &[Stmt])> {
        self.stmts.iter().filter_map(|s| match &s.kind {
            StmtKind::Function { name, params, body } => Some((name.as_str(), params.as_slice(), body.as_slice())),
            _ => None,
        })
    }
}

/// Positionless structural equality, used by round-trip checks.
pub fn same_shape(a: &Program, b: &Program) -> bool {
    fn strip_stmts(stmts: &[Stmt]) -> Vec<Stmt> {
        stmts.iter().map(strip_stmt).collect()
    }
    fn strip_expr(e: &Expr) -> Expr {
        let kind = match &e.kind {
            ExprKind::Neg(x) => ExprKind::Neg(Box::new(strip_expr(x))),
            ExprKind::Binary(op, l, r) => ExprKind::Binary(*op, Box::new(strip_expr(l)), Box::new(strip_expr(r))),
            ExprKind::Call(n, args) => ExprKind::Call(n.clone(), args.iter().map(strip_expr).collect()),
            ExprKind::Index(n, idx) => ExprKind::Index(n.clone(), idx.iter().map(strip_expr).collect()),
            ExprKind::Accessor(n, acc) => ExprKind::Accessor(
                n.clone(),
                match acc {
                    Accessor::LocalBlocks => Accessor::LocalBlocks,
                    Accessor::LocalBlockId(x) => Accessor::LocalBlockId(Box::new(strip_expr(x))),
                    Accessor::Low(x) => Accessor::Low(Box::new(strip_expr(x))),
                    Accessor::High(x) => Accessor::High(Box::new(strip_expr(x))),
                },
            ),
            other => other.clone(),
        };
        Expr::new(kind, Pos::default())
    }
    fn strip_type(t: &TypeExpr) -> TypeExpr {
        TypeExpr {
            apps: t
                .apps
                .iter()
                .map(|a| TypeApp {
                    name: a.name.clone(),
                    args: a.args.as_ref().map(|args| {
                        args.iter()
                            .map(|arg| match arg {
                                TypeArg::Expr(e) => TypeArg::Expr(strip_expr(e)),
                                TypeArg::Type(t) => TypeArg::Type(strip_type(t)),
                            })
                            .collect()
                    }),
                    pos: Pos::default(),
                })
                .collect(),
            pos: Pos::default(),
        }
    }
    fn strip_stmt(s: &Stmt) -> Stmt {
        let kind = match &s.kind {
            StmtKind::VarDecl { name, ty, init } => StmtKind::VarDecl {
                name: name.clone(),
                ty: ty.as_ref().map(strip_type),
                init: init.as_ref().map(strip_expr),
            },
            StmtKind::Assign { target, value } => StmtKind::Assign {
                target: LValue {
                    name: target.name.clone(),
                    indices: target.indices.iter().map(strip_expr).collect(),
                    pos: Pos::default(),
                },
                value: strip_expr(value),
            },
            StmtKind::For { var, from, to, body } => StmtKind::For {
                var: var.clone(),
                from: strip_expr(from),
                to: strip_expr(to),
                body: strip_stmts(body),
            },
            StmtKind::Proc { rank, body } => StmtKind::Proc { rank: strip_expr(rank), body: strip_stmts(body) },
            StmtKind::Call { name, args } => {
                StmtKind::Call { name: name.clone(), args: args.iter().map(strip_expr).collect() }
            }
            StmtKind::Function { name, params, body } => StmtKind::Function {
                name: name.clone(),
                params: params
                    .iter()
                    .map(|p| Param { name: p.name.clone(), ty: strip_type(&p.ty), pos: Pos::default() })
                    .collect(),
                body: strip_stmts(body),
            },
            StmtKind::Sync { var } => StmtKind::Sync { var: var.clone() },
        };
        Stmt { kind, pos: Pos::default() }
    }
    strip_stmts(&a.stmts) == strip_stmts(&b.stmts)
}
