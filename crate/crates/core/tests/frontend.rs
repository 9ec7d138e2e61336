use meshlite::frontend::ast::*;
use meshlite::frontend::pretty::print_program;
use meshlite::frontend::{parse_source, Pos, SyntaxError};
use proptest::prelude::*;

fn p() -> Pos {
    Pos::default()
}

fn ident() -> impl Strategy<Value = String> {
    "[a-zA-Z_][a-zA-Z0-9_]{0,6}".prop_filter("keyword", |s| {
        !matches!(s.as_str(), "var" | "for" | "from" | "to" | "proc" | "function" | "sync")
    })
}

fn binop() -> impl Strategy<Value = BinOp> {
    prop_oneof![
        Just(BinOp::Add),
        Just(BinOp::Sub),
        Just(BinOp::Mul),
        Just(BinOp::Div),
        Just(BinOp::Lt),
        Just(BinOp::Le),
        Just(BinOp::Gt),
        Just(BinOp::Ge),
        Just(BinOp::Eq),
        Just(BinOp::Ne),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..100_000).prop_map(ExprKind::Int),
        (0.0f64..1e6).prop_map(ExprKind::Real),
        "[ -~]{0,8}".prop_map(ExprKind::Str),
        ident().prop_map(ExprKind::Var),
        ident().prop_map(|n| ExprKind::Accessor(n, Accessor::LocalBlocks)),
    ]
    .prop_map(|k| Expr::new(k, p()));
    leaf.prop_recursive(4, 24, 3, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |e| ExprKind::Neg(b(e))),
            (binop(), inner.clone(), inner.clone()).prop_map(move |(o, l, r)| ExprKind::Binary(o, b(l), b(r))),
            (ident(), prop::collection::vec(inner.clone(), 0..3)).prop_map(|(n, a)| ExprKind::Call(n, a)),
            (ident(), prop::collection::vec(inner.clone(), 1..3)).prop_map(|(n, a)| ExprKind::Index(n, a)),
            (ident(), inner.clone()).prop_map(move |(n, e)| ExprKind::Accessor(n, Accessor::LocalBlockId(b(e)))),
            (ident(), inner.clone()).prop_map(move |(n, e)| ExprKind::Accessor(n, Accessor::Low(b(e)))),
            (ident(), inner).prop_map(move |(n, e)| ExprKind::Accessor(n, Accessor::High(b(e)))),
        ]
        .prop_map(|k| Expr::new(k, p()))
    })
}

/// In an argument slot, `name[` and `name::` begin a nested type and a bare
/// `name` is an expression; keep generated arguments on the unambiguous side.
fn expr_arg() -> impl Strategy<Value = TypeArg> {
    expr()
        .prop_filter("reads as a type", |e| {
            !matches!(e.kind, ExprKind::Index(..) | ExprKind::Accessor(_, Accessor::Low(_) | Accessor::High(_)))
        })
        .prop_map(TypeArg::Expr)
}

fn type_arg_ok(t: &TypeExpr) -> bool {
    t.apps.len() > 1 || t.apps[0].args.is_some()
}

fn type_expr() -> impl Strategy<Value = TypeExpr> {
    let app = |args: BoxedStrategy<Option<Vec<TypeArg>>>| {
        (ident(), args).prop_map(|(name, args)| TypeApp { name, args, pos: p() })
    };
    let leaf_args = prop_oneof![
        Just(None),
        prop::collection::vec(expr_arg(), 0..3).prop_map(Some),
    ]
    .boxed();
    let leaf = prop::collection::vec(app(leaf_args), 1..4).prop_map(|apps| TypeExpr { apps, pos: p() });
    leaf.prop_recursive(2, 8, 2, move |inner| {
        let args = prop::collection::vec(
            prop_oneof![expr_arg(), inner.prop_filter("reads as an expression", type_arg_ok).prop_map(TypeArg::Type)],
            0..3,
        )
        .prop_map(Some)
        .boxed();
        prop::collection::vec(app(args), 1..4).prop_map(|apps| TypeExpr { apps, pos: p() })
    })
}

fn stmt() -> impl Strategy<Value = Stmt> {
    let simple = prop_oneof![
        (ident(), prop::option::of(type_expr()), prop::option::of(expr()))
            .prop_map(|(name, ty, init)| StmtKind::VarDecl { name, ty, init }),
        (ident(), prop::collection::vec(expr(), 0..3), expr()).prop_map(|(name, indices, value)| StmtKind::Assign {
            target: LValue { name, indices, pos: p() },
            value
        }),
        (ident(), prop::collection::vec(expr(), 0..3)).prop_map(|(name, args)| StmtKind::Call { name, args }),
        prop::option::of(ident()).prop_map(|var| StmtKind::Sync { var }),
    ]
    .prop_map(|kind| Stmt { kind, pos: p() });
    simple.prop_recursive(3, 16, 3, |inner| {
        let body = prop::collection::vec(inner, 0..3);
        prop_oneof![
            (ident(), expr(), expr(), body.clone()).prop_map(|(var, from, to, body)| StmtKind::For { var, from, to, body }),
            (expr(), body.clone()).prop_map(|(rank, body)| StmtKind::Proc { rank, body }),
            (ident(), prop::collection::vec((ident(), type_expr()), 0..3), body).prop_map(|(name, ps, body)| {
                StmtKind::Function {
                    name,
                    params: ps.into_iter().map(|(name, ty)| Param { name, ty, pos: p() }).collect(),
                    body,
                }
            }),
        ]
        .prop_map(|kind| Stmt { kind, pos: p() })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_round_trips(stmts in prop::collection::vec(stmt(), 0..6)) {
        let prog = Program { stmts };
        let text = print_program(&prog);
        let back = parse_source(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert!(same_shape(&prog, &back), "{text}");
        prop_assert_eq!(print_program(&back), text);
    }
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn listing_one_as_printed_has_unbalanced_bracket() {
    let err = parse_source(&golden("listing1.mesh")).unwrap_err();
    assert!(matches!(err, SyntaxError::Parse(_)));
    assert_eq!(err.pos().line, 1);
    let fixed = golden("listing1.mesh").replacen("on[0]];", "on[0]]];", 1);
    let prog = parse_source(&fixed).unwrap();
    assert_eq!(prog.stmts.len(), 3);
    assert!(matches!(prog.stmts[2].kind, StmtKind::Assign { .. }));
}

#[test]
fn listing_two_as_printed_has_unbalanced_bracket() {
    assert!(parse_source(&golden("listing2.mesh")).is_err());
    let fixed = golden("listing2.mesh").replacen("on[0]] ::", "on[0]]] ::", 1);
    assert_eq!(parse_source(&fixed).unwrap().stmts.len(), 3);
}

#[test]
fn listings_three_and_four_parse_verbatim() {
    let three = parse_source(&golden("listing3.mesh")).unwrap();
    // `var i,j;` is two declarations.
    assert_eq!(three.stmts.len(), 17);
    let four = parse_source(&golden("listing4.mesh")).unwrap();
    assert_eq!(four.stmts.len(), 6);
    let StmtKind::For { from, to, .. } = &four.stmts[2].kind else { panic!("expected a loop") };
    assert_eq!(from.kind, ExprKind::Int(0));
    assert!(matches!(to.kind, ExprKind::Binary(BinOp::Sub, ..)));
}

#[test]
fn corpus_differs_from_listings_only_where_noted() {
    let corpus = std::fs::read_to_string(format!("{}/examples/fft2d.mesh", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let listing = golden("listing3.mesh");
    let norm = |s: &str| s.lines().map(|l| l.trim().to_string()).filter(|l| !l.is_empty()).collect::<Vec<_>>();
    let (a, b) = (norm(&listing), norm(&corpus));
    let changed: Vec<_> = a.iter().zip(&b).filter(|(x, y)| x != y).collect();
    assert_eq!(a.len(), b.len());
    assert_eq!(
        changed,
        [
            (&"var n:=8192;".to_string(), &"var n:=16;".to_string()),
            (&"S:=C;".to_string(), &"S:=B;".to_string()),
            (
                &"proc 0 {writefile(S, \"image.dat\")};".to_string(),
                &"proc 0 {writefile(S, \"image.out.dat\")};".to_string()
            ),
        ]
    );
}
