//! Canonical text form of COQL syntax trees. Parsing the printed form
//! yields a structurally identical tree, which the test suites rely on.

use super::ast::*;

fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Binary { op, .. } => match op {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div => 6,
        },
        Expr::Not(_) => 3,
        Expr::Neg(_) => 7,
        _ => 10,
    }
}

fn child(expr: &Expr, parent_prec: u8) -> String {
    let text = print_expr(expr);
    if precedence(expr) < parent_prec {
        format!("({text})")
    } else {
        text
    }
}

pub fn print_expr(expr: &Expr) -> String {
    match expr {
        Expr::Int(v) => v.to_string(),
        Expr::Dec(text) => text.clone(),
        Expr::Str(text) => format!("'{}'", text.replace('\\', "\\\\").replace('\'', "\\'")),
        Expr::Name(name) => name.name.clone(),
        Expr::This => "this".to_string(),
        Expr::Filter { source, var, cond } => match var {
            Some(v) => format!("({} {} | {})", print_expr(source), v, print_expr(cond)),
            None => format!("({} | {})", print_expr(source), print_expr(cond)),
        },
        Expr::MultiDeproject(chains) => {
            let parts: Vec<String> = chains.iter().map(print_expr).collect();
            format!("[{}]", parts.join(" AND "))
        }
        Expr::Subquery(q) => format!("({})", print_query(q)),
        Expr::Binary { op, lhs, rhs } => {
            let prec = precedence(expr);
            format!(
                "{} {} {}",
                child(lhs, prec),
                op.text(),
                child(rhs, prec + 1)
            )
        }
        Expr::Not(inner) => format!("NOT {}", child(inner, 3)),
        Expr::Neg(inner) => format!("-{}", child(inner, 7)),
        Expr::Aggregate { func, arg } => format!("{}({})", func.text(), print_expr(arg)),
        Expr::Call { recv, name, args } => {
            let args: Vec<String> = args.iter().map(print_expr).collect();
            format!("{}.{}({})", child(recv, 10), name, args.join(", "))
        }
        Expr::Step { recv, step } => {
            let base = child(recv, 10);
            match step {
                Step::Project(dim) => format!("{base} -> {dim}"),
                Step::Dot(dim) => format!("{base}.{dim}"),
                Step::DotTuple(exprs) => {
                    let parts: Vec<String> = exprs.iter().map(print_expr).collect();
                    format!("{base}.<{}>", parts.join(", "))
                }
                Step::Deproject(items) => {
                    let mut out = base;
                    for item in items {
                        match item {
                            DeprojItem::Name(n) => out.push_str(&format!(" <- {n}")),
                            DeprojItem::Target(t) => {
                                let text = print_expr(t);
                                if text.starts_with('(') || text.starts_with('[') {
                                    out.push_str(&format!(" <- {text}"));
                                } else {
                                    out.push_str(&format!(" <- ({text})"));
                                }
                            }
                        }
                    }
                    out
                }
            }
        }
    }
}

fn print_decl_type(ty: &DeclType) -> String {
    match ty {
        DeclType::Collection(None) => "Collection".to_string(),
        DeclType::Collection(Some(c)) => format!("Collection<{c}>"),
        DeclType::Item => "Item".to_string(),
        DeclType::Concept(c) => c.name.clone(),
        DeclType::Double => "double".to_string(),
        DeclType::Integer => "integer".to_string(),
    }
}

fn print_stmt(stmt: &Stmt) -> String {
    match stmt {
        Stmt::Decl { ty, name, value } => {
            format!("{} {} = {};", print_decl_type(ty), name, print_expr(value))
        }
        Stmt::If { cond, then_return } => {
            let exprs: Vec<String> = then_return.iter().map(print_expr).collect();
            format!(
                "IF ({}) THEN RETURN ({});",
                print_expr(cond),
                exprs.join(", ")
            )
        }
        Stmt::Return(exprs) => {
            let exprs: Vec<String> = exprs.iter().map(print_expr).collect();
            format!("RETURN ({});", exprs.join(", "))
        }
    }
}

fn print_sources(sources: &[Source]) -> String {
    let parts: Vec<String> = sources
        .iter()
        .map(|s| match &s.var {
            Some(v) => format!("{} {}", print_expr(&s.expr), v),
            None => print_expr(&s.expr),
        })
        .collect();
    if sources.len() == 1 {
        parts.into_iter().next().unwrap()
    } else {
        format!("({})", parts.join(", "))
    }
}

pub fn print_query(q: &Query) -> String {
    let mut out = String::new();
    if q.forall {
        out.push_str("FORALL ");
        out.push_str(&print_sources(&q.sources));
        out.push_str(" { ");
        for stmt in &q.body {
            out.push_str(&print_stmt(stmt));
            out.push(' ');
        }
        out.push('}');
        return out;
    }
    out.push_str("FROM ");
    out.push_str(&print_sources(&q.sources));
    if !q.body.is_empty() {
        out.push_str(" { ");
        for stmt in &q.body {
            out.push_str(&print_stmt(stmt));
            out.push(' ');
        }
        out.push('}');
    }
    if let Some(cond) = &q.where_clause {
        out.push_str(" WHERE ");
        out.push_str(&print_expr(cond));
    }
    match &q.select {
        None => {}
        Some(SelectClause::Star) => out.push_str(" SELECT *"),
        Some(SelectClause::Exprs(items)) => {
            let parts: Vec<String> = items
                .iter()
                .map(|item| match &item.alias {
                    Some(a) => format!("{} AS {}", print_expr(&item.expr), a),
                    None => print_expr(&item.expr),
                })
                .collect();
            out.push_str(" SELECT ");
            out.push_str(&parts.join(", "));
        }
    }
    out
}

pub fn print_request(request: &Request) -> String {
    match request {
        Request::Query(q) => print_query(q),
        Request::Expr(e) => print_expr(e),
    }
}
