//! Static checking of whole programs.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::chain::{Arg, TypeChain};
use super::lower::lower_variable_chain;
use super::plan::{plan_of, AllocationPlan};
use super::{Partition, TypeError};
use crate::frontend::ast::*;
use crate::frontend::pretty::print_expr;
use crate::frontend::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub rule: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn new(pos: Pos, rule: &'static str, message: impl Into<String>) -> Self {
        Self { pos, rule, message: message.into() }
    }

    /// `file:line:col: RULE: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}:{}: {}: {}", self.pos.line, self.pos.col, self.rule, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.pos, self.rule, self.message)
    }
}

/// A program that passed [`check_program`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckedProgram {
    pub program: Program,
}

/// Builtins callable as statements, with their arity.
pub const BUILTIN_PROCS: &[(&str, usize)] = &[("FFT", 2), ("computeSin", 1), ("readfile", 2), ("writefile", 2)];

#[derive(Debug, Clone)]
struct Sym {
    chain: Option<TypeChain>,
    plan: Option<AllocationPlan<Arg>>,
}

impl Sym {
    fn untyped() -> Self {
        Sym { chain: None, plan: None }
    }

    fn is_array(&self) -> bool {
        self.plan.as_ref().is_some_and(|p| !p.is_scalar())
    }

    fn is_partitioned(&self) -> bool {
        self.plan.as_ref().is_some_and(|p| p.partition != Partition::None)
    }

    fn is_collective(&self) -> bool {
        self.plan.as_ref().is_some_and(|p| {
            !p.is_scalar() || p.distribution != super::Distribution::Multiple
        })
    }
}

struct Checker<'p> {
    scopes: Vec<HashMap<String, Sym>>,
    functions: BTreeMap<String, &'p [Param]>,
    /// Untyped variables never assigned after declaration, with a foldable initializer.
    constants: HashMap<String, i64>,
    assigned: HashSet<String>,
    in_proc: usize,
    diags: Vec<Diagnostic>,
}

/// Collect every name that appears as an assignment target or loop variable.
fn assigned_names(stmts: &[Stmt], out: &mut HashSet<String>) {
    for s in stmts {
        match &s.kind {
            StmtKind::Assign { target, .. } => {
                out.insert(target.name.clone());
            }
            StmtKind::For { var, body, .. } => {
                out.insert(var.clone());
                assigned_names(body, out);
            }
            StmtKind::Proc { body, .. } | StmtKind::Function { body, .. } => assigned_names(body, out),
            _ => {}
        }
    }
}

pub fn check_program(program: &Program) -> Result<CheckedProgram, Vec<Diagnostic>> {
    let mut assigned = HashSet::new();
    assigned_names(&program.stmts, &mut assigned);
    let mut ck = Checker {
        scopes: vec![HashMap::new()],
        functions: BTreeMap::new(),
        constants: HashMap::new(),
        assigned,
        in_proc: 0,
        diags: Vec::new(),
    };
    for s in &program.stmts {
        if let StmtKind::Function { name, params, .. } = &s.kind {
            if ck.functions.insert(name.clone(), params).is_some() || is_builtin(name) {
                ck.diags.push(Diagnostic::new(s.pos, "Redeclaration", format!("function `{name}` defined twice")));
            }
        }
    }
    ck.stmts(&program.stmts, true);
    if ck.diags.is_empty() {
        Ok(CheckedProgram { program: program.clone() })
    } else {
        ck.diags.sort_by_key(|d| d.pos);
        Err(ck.diags)
    }
}

fn is_builtin(name: &str) -> bool {
    name == "processes" || BUILTIN_PROCS.iter().any(|(b, _)| *b == name)
}

pub(crate) fn type_error_rule(e: &TypeError) -> &'static str {
    match e {
        TypeError::InvalidCombination { .. } => "InvalidCombination",
        TypeError::UnknownAttribute(_) => "UnknownAttribute",
        TypeError::UnknownType(_) => "UnknownType",
        TypeError::BadTypeArguments { .. } => "BadTypeArguments",
        TypeError::MissingBaseType(_) => "MissingBaseType",
        TypeError::IncompletePlan(_) => "IncompletePlan",
        TypeError::UnresolvedArgument(_) => "UnresolvedArgument",
    }
}

impl<'p> Checker<'p> {
    fn err(&mut self, pos: Pos, rule: &'static str, message: impl Into<String>) {
        self.diags.push(Diagnostic::new(pos, rule, message));
    }

    fn lookup(&self, name: &str) -> Option<&Sym> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn declare(&mut self, pos: Pos, name: &str, sym: Sym) {
        let scope = self.scopes.last_mut().unwrap();
        if scope.contains_key(name) {
            self.diags.push(Diagnostic::new(pos, "Redeclaration", format!("`{name}` is already declared in this scope")));
        }
        self.scopes.last_mut().unwrap().insert(name.to_string(), sym);
    }

    fn fold(&self, e: &Expr) -> Option<i64> {
        match &e.kind {
            ExprKind::Int(v) => Some(*v),
            ExprKind::Var(n) => self.constants.get(n).copied(),
            ExprKind::Neg(x) => self.fold(x).map(|v| -v),
            ExprKind::Binary(op, l, r) => {
                let (l, r) = (self.fold(l)?, self.fold(r)?);
                match op {
                    BinOp::Add => l.checked_add(r),
                    BinOp::Sub => l.checked_sub(r),
                    BinOp::Mul => l.checked_mul(r),
                    BinOp::Div => l.checked_div(r),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn chain_of(&mut self, ty: &TypeExpr) -> Option<TypeChain> {
        let mut uses = Vec::new();
        let result = {
            let this = &*self;
            let mut eval = |e: &Expr| -> Result<Arg, TypeError> {
                uses.push(e.clone());
                Ok(match this.fold(e) {
                    Some(v) => Arg::Known(v),
                    None => Arg::Symbolic(print_expr(e)),
                })
            };
            lower_variable_chain(ty, &mut eval)
        };
        for e in &uses {
            self.expr(e);
        }
        match result {
            Ok(chain) => Some(chain),
            Err(e) => {
                self.err(ty.pos, type_error_rule(&e), e.to_string());
                None
            }
        }
    }

    fn stmts(&mut self, stmts: &[Stmt], top: bool) {
        for s in stmts {
            self.stmt(s, top);
        }
    }

    fn scoped(&mut self, body: &[Stmt]) {
        self.scopes.push(HashMap::new());
        self.stmts(body, false);
        self.scopes.pop();
    }

    fn stmt(&mut self, s: &Stmt, top: bool) {
        match &s.kind {
            StmtKind::VarDecl { name, ty, init } => self.declaration(s.pos, name, ty.as_ref(), init.as_ref(), top),
            StmtKind::Assign { target, value } => self.assignment(target, value),
            StmtKind::For { var, from, to, body } => {
                self.expr(from);
                self.expr(to);
                self.scopes.push(HashMap::new());
                match self.lookup(var) {
                    Some(sym) if sym.chain.as_ref().is_some_and(|c| c.is_read_only()) => {
                        self.err(s.pos, "ConstViolation", format!("loop variable `{var}` is const"))
                    }
                    Some(sym) if sym.plan.is_some() && sym.is_collective() => {
                        self.err(s.pos, "TypeMismatch", format!("loop variable `{var}` must be a local scalar"))
                    }
                    Some(_) => {}
                    None => self.declare(s.pos, var, Sym::untyped()),
                }
                self.stmts(body, false);
                self.scopes.pop();
            }
            StmtKind::Proc { rank, body } => {
                self.expr(rank);
                self.in_proc += 1;
                self.scoped(body);
                self.in_proc -= 1;
            }
            StmtKind::Call { name, args } => self.call(s.pos, name, args),
            StmtKind::Function { name, params, body } => {
                if !top {
                    self.err(s.pos, "NestedFunction", format!("function `{name}` must be defined at top level"));
                }
                self.scopes.push(HashMap::new());
                for p in params {
                    let chain = self.chain_of(&p.ty);
                    let plan = chain.as_ref().and_then(|c| plan_of(c).ok());
                    self.declare(p.pos, &p.name, Sym { chain, plan });
                }
                self.stmts(body, false);
                self.scopes.pop();
            }
            StmtKind::Sync { var } => {
                if self.in_proc > 0 {
                    self.err(s.pos, "CollectiveInProc", "sync is collective and cannot appear inside proc");
                }
                if let Some(v) = var {
                    if self.lookup(v).is_none() {
                        self.err(s.pos, "UndeclaredVariable", format!("`{v}` is not declared"));
                    }
                }
            }
        }
    }

    fn declaration(&mut self, pos: Pos, name: &str, ty: Option<&TypeExpr>, init: Option<&Expr>, top: bool) {
        if let Some(init) = init {
            self.expr(init);
        }
        let Some(ty) = ty else {
            if top && !self.assigned.contains(name) {
                if let Some(v) = init.and_then(|e| self.fold(e)) {
                    self.constants.insert(name.to_string(), v);
                }
            }
            self.declare(pos, name, Sym::untyped());
            return;
        };
        let Some(chain) = self.chain_of(ty) else {
            self.declare(pos, name, Sym::untyped());
            return;
        };
        let plan = match plan_of(&chain) {
            Ok(p) => Some(p),
            Err(e) => {
                self.err(ty.pos, type_error_rule(&e), e.to_string());
                None
            }
        };
        if let Some(plan) = &plan {
            self.check_plan_refs(pos, name, plan, &chain);
        }
        let sym = Sym { chain: Some(chain), plan };
        if self.in_proc > 0 && sym.is_collective() {
            self.err(pos, "CollectiveInProc", format!("declaration of distributed `{name}` is collective"));
        }
        if init.is_some() && sym.is_array() {
            self.err(pos, "TypeMismatch", format!("array `{name}` cannot have a scalar initializer"));
        }
        self.declare(pos, name, sym);
    }

    fn check_plan_refs(&mut self, pos: Pos, name: &str, plan: &AllocationPlan<Arg>, chain: &TypeChain) {
        if let Some(base) = &plan.share_base {
            match self.lookup(base).cloned() {
                None => self.err(pos, "ShareTarget", format!("share target `{base}` is not declared")),
                Some(b) if !b.is_array() => self.err(pos, "ShareTarget", format!("share target `{base}` is not an array")),
                Some(b) => {
                    let bp = b.plan.unwrap();
                    if bp.share_base.is_some() {
                        self.err(pos, "ShareTarget", format!("`{base}` is itself a share view"));
                    }
                    let count = |p: &Partition<Arg>| match p {
                        Partition::None => Arg::Known(1),
                        Partition::Horizontal(k) | Partition::Vertical(k) => k.clone(),
                    };
                    let mismatch = bp.elem != plan.elem
                        || bp.shape.len() != plan.shape.len()
                        || count(&bp.partition) != count(&plan.partition)
                        || (is_known(&bp.shape) && is_known(&plan.shape) && {
                            let total = |s: &[Arg]| s.iter().map(known_value).product::<i64>();
                            total(&bp.shape) != total(&plan.shape)
                        });
                    if mismatch {
                        self.err(
                            pos,
                            "ShareFootprintMismatch",
                            format!("`{name}` cannot share the storage of `{base}`: block footprints differ"),
                        );
                    }
                }
            }
        }
        if let Some(d) = chain.arraydist_source() {
            let ok = self.lookup(d).is_some_and(|s| {
                s.is_array()
                    && s.plan.as_ref().is_some_and(|p| p.elem == super::ElemKind::Int && p.shape.len() == 1)
            });
            if !ok {
                self.err(pos, "ArrayDistTarget", format!("`{d}` must be a declared one-dimensional Int array"));
            }
        }
    }

    fn assignment(&mut self, target: &LValue, value: &Expr) {
        for i in &target.indices {
            self.expr(i);
        }
        self.expr(value);
        let Some(sym) = self.lookup(&target.name).cloned() else {
            self.err(target.pos, "UndeclaredVariable", format!("`{}` is not declared", target.name));
            return;
        };
        if sym.chain.as_ref().is_some_and(|c| c.is_read_only()) {
            self.err(target.pos, "ConstViolation", format!("`{}` is const and cannot be assigned", target.name));
        }
        if sym.is_array() && target.indices.is_empty() {
            let src = match &value.kind {
                ExprKind::Var(n) => self.lookup(n).cloned(),
                _ => None,
            };
            match src {
                Some(src) if src.is_array() => {
                    let (dp, sp) = (sym.plan.as_ref().unwrap(), src.plan.as_ref().unwrap());
                    if dp.elem != sp.elem || (is_known(&dp.shape) && is_known(&sp.shape) && dp.shape != sp.shape) {
                        self.err(target.pos, "ShapeMismatch", "array assignment needs identical shape and element type");
                    }
                    if self.in_proc > 0 {
                        self.err(target.pos, "CollectiveInProc", "array assignment is collective and cannot appear inside proc");
                    }
                }
                _ => self.err(target.pos, "TypeMismatch", format!("`{}` is an array; assign another array to it", target.name)),
            }
        }
    }

    fn call(&mut self, pos: Pos, name: &str, args: &[Expr]) {
        for a in args {
            self.expr(a);
        }
        if let Some((_, arity)) = BUILTIN_PROCS.iter().find(|(b, _)| *b == name) {
            if args.len() != *arity {
                self.err(pos, "ArityMismatch", format!("`{name}` takes {arity} argument(s), {} given", args.len()));
            }
            return;
        }
        let Some(params) = self.functions.get(name).copied() else {
            self.err(pos, "UnknownFunction", format!("no function named `{name}`"));
            return;
        };
        if params.len() != args.len() {
            self.err(pos, "ArityMismatch", format!("`{name}` takes {} argument(s), {} given", params.len(), args.len()));
            return;
        }
        for (p, a) in params.iter().zip(args) {
            let Some(formal) = self.chain_of(&p.ty) else { continue };
            let actual = match &a.kind {
                ExprKind::Var(n) => self.lookup(n).and_then(|s| s.chain.clone()),
                _ => None,
            };
            match actual {
                Some(actual) if actual == formal => {}
                Some(actual) => self.err(
                    a.pos,
                    "ArgumentChainMismatch",
                    format!("argument `{}` has type `{actual}`, parameter `{}` expects `{formal}`", print_expr(a), p.name),
                ),
                None => self.err(
                    a.pos,
                    "ArgumentChainMismatch",
                    format!("parameter `{}` expects a variable of type `{formal}`", p.name),
                ),
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Int(_) | ExprKind::Real(_) | ExprKind::Str(_) => {}
            ExprKind::Var(n) => {
                if self.lookup(n).is_none() {
                    self.err(e.pos, "UndeclaredVariable", format!("`{n}` is not declared"));
                }
            }
            ExprKind::Neg(x) => self.expr(x),
            ExprKind::Binary(_, l, r) => {
                self.expr(l);
                self.expr(r);
            }
            ExprKind::Call(name, args) => {
                for a in args {
                    self.expr(a);
                }
                if name != "processes" {
                    self.err(e.pos, "NotAValue", format!("`{name}` does not produce a value"));
                } else if !args.is_empty() {
                    self.err(e.pos, "ArityMismatch", "`processes` takes no arguments");
                }
            }
            ExprKind::Index(n, idx) => {
                for i in idx {
                    self.expr(i);
                }
                match self.lookup(n) {
                    None => self.err(e.pos, "UndeclaredVariable", format!("`{n}` is not declared")),
                    Some(s) if s.plan.is_some() && !s.is_array() => {
                        self.err(e.pos, "NotAnArray", format!("`{n}` is not an array"))
                    }
                    _ => {}
                }
            }
            ExprKind::Accessor(n, acc) => {
                match acc {
                    Accessor::LocalBlocks => {}
                    Accessor::LocalBlockId(x) | Accessor::Low(x) | Accessor::High(x) => self.expr(x),
                }
                match self.lookup(n) {
                    None => self.err(e.pos, "UndeclaredVariable", format!("`{n}` is not declared")),
                    Some(s) if !s.is_partitioned() => {
                        self.err(e.pos, "NotPartitioned", format!("`{n}` is not a partitioned array"))
                    }
                    _ => {}
                }
            }
        }
    }
}

fn is_known(shape: &[Arg]) -> bool {
    shape.iter().all(|a| matches!(a, Arg::Known(_)))
}

fn known_value(a: &Arg) -> i64 {
    match a {
        Arg::Known(v) => *v,
        Arg::Symbolic(_) => 0,
    }
}
