//! Source printer. Output re-parses to a structurally identical tree.

use super::ast::*;
use std::fmt::Write;

pub fn print_program(prog: &Program) -> String {
    let mut out = String::new();
    for s in &prog.stmts {
        print_stmt(&mut out, s, 0);
    }
    out
}

pub fn print_type(ty: &TypeExpr) -> String {
    let mut out = String::new();
    write_type(&mut out, ty);
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn print_body(out: &mut String, body: &[Stmt], depth: usize) {
    out.push_str("{\n");
    for s in body {
        print_stmt(out, s, depth + 1);
    }
    indent(out, depth);
    out.push('}');
}

fn print_stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match &s.kind {
        StmtKind::VarDecl { name, ty, init } => {
            write!(out, "var {name}").unwrap();
            if let Some(ty) = ty {
                out.push_str(" : ");
                write_type(out, ty);
            }
            if let Some(init) = init {
                out.push_str(" := ");
                write_expr(out, init);
            }
        }
        StmtKind::Assign { target, value } => {
            out.push_str(&target.name);
            for i in &target.indices {
                out.push('[');
                write_expr(out, i);
                out.push(']');
            }
            out.push_str(" := ");
            write_expr(out, value);
        }
        StmtKind::For { var, from, to, body } => {
            write!(out, "for {var} from ").unwrap();
            write_expr(out, from);
            out.push_str(" to ");
            write_expr(out, to);
            out.push(' ');
            print_body(out, body, depth);
        }
        StmtKind::Proc { rank, body } => {
            out.push_str("proc ");
            write_expr(out, rank);
            out.push(' ');
            print_body(out, body, depth);
        }
        StmtKind::Call { name, args } => write_call(out, name, args),
        StmtKind::Function { name, params, body } => {
            write!(out, "function {name}(").unwrap();
            for (k, p) in params.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write!(out, "{} : ", p.name).unwrap();
                write_type(out, &p.ty);
            }
            out.push_str(") ");
            print_body(out, body, depth);
        }
        StmtKind::Sync { var } => {
            out.push_str("sync");
            if let Some(v) = var {
                write!(out, " {v}").unwrap();
            }
        }
    }
    out.push_str(";\n");
}

fn write_call(out: &mut String, name: &str, args: &[Expr]) {
    write!(out, "{name}(").unwrap();
    for (k, a) in args.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        write_expr(out, a);
    }
    out.push(')');
}

fn write_type(out: &mut String, ty: &TypeExpr) {
    for (k, app) in ty.apps.iter().enumerate() {
        if k > 0 {
            out.push_str("::");
        }
        out.push_str(&app.name);
        if let Some(args) = &app.args {
            out.push('[');
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                match a {
                    TypeArg::Expr(e) => write_expr(out, e),
                    TypeArg::Type(t) => write_type(out, t),
                }
            }
            out.push(']');
        }
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Int(v) => write!(out, "{v}").unwrap(),
        ExprKind::Real(v) => {
            let text = format!("{v}");
            out.push_str(&text);
            if !text.contains('.') {
                out.push_str(".0");
            }
        }
        ExprKind::Str(s) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
        }
        ExprKind::Var(name) => out.push_str(name),
        ExprKind::Neg(inner) => {
            out.push_str("-(");
            write_expr(out, inner);
            out.push(')');
        }
        ExprKind::Binary(op, l, r) => {
            out.push('(');
            write_expr(out, l);
            write!(out, " {} ", op.symbol()).unwrap();
            write_expr(out, r);
            out.push(')');
        }
        ExprKind::Call(name, args) => write_call(out, name, args),
        ExprKind::Index(name, idx) => {
            out.push_str(name);
            for i in idx {
                out.push('[');
                write_expr(out, i);
                out.push(']');
            }
        }
        ExprKind::Accessor(name, acc) => match acc {
            Accessor::LocalBlocks => write!(out, "{name}.localblocks").unwrap(),
            Accessor::LocalBlockId(j) => {
                write!(out, "{name}.localblockid[").unwrap();
                write_expr(out, j);
                out.push(']');
            }
            Accessor::Low(b) | Accessor::High(b) => {
                write!(out, "{name}[").unwrap();
                write_expr(out, b);
                out.push_str(if matches!(acc, Accessor::Low(_)) { "].low" } else { "].high" });
            }
        },
    }
}
