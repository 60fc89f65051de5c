//! Recursive-descent parser for COQL with token-level backtracking for
//! the few ambiguous parenthesized forms (source lists, select lists,
//! filters).

use super::ast::*;
use super::lexer::{lex, Token, TokenKind};
use super::CoqlError;

pub fn parse_request(text: &str) -> Result<Request, CoqlError> {
    let mut p = Parser::new(text)?;
    let request = match p.peek() {
        TokenKind::From | TokenKind::Forall | TokenKind::Select => Request::Query(p.query()?),
        _ => Request::Expr(p.expr()?),
    };
    p.eat_if(&TokenKind::Semi);
    p.expect_eof()?;
    Ok(request)
}

pub fn parse_query(text: &str) -> Result<Query, CoqlError> {
    let mut p = Parser::new(text)?;
    let q = p.query()?;
    p.eat_if(&TokenKind::Semi);
    p.expect_eof()?;
    Ok(q)
}

pub fn parse_expr_text(text: &str) -> Result<Expr, CoqlError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.eat_if(&TokenKind::Semi);
    p.expect_eof()?;
    Ok(e)
}

/// `Owner::name(Type p, ...) { body }`
pub fn parse_property(text: &str) -> Result<PropertyDef, CoqlError> {
    let mut p = Parser::new(text)?;
    let owner = p.ident("property owner concept")?;
    p.expect(TokenKind::DoubleColon)?;
    let name = p.ident("property name")?;
    p.expect(TokenKind::LParen)?;
    let mut params = Vec::new();
    if !p.eat_if(&TokenKind::RParen) {
        loop {
            let ty = p.ident("parameter concept")?;
            let pname = p.ident("parameter name")?;
            params.push((ty, pname));
            if !p.eat_if(&TokenKind::Comma) {
                break;
            }
        }
        p.expect(TokenKind::RParen)?;
    }
    let body = p.block()?;
    p.eat_if(&TokenKind::Semi);
    p.expect_eof()?;
    Ok(PropertyDef {
        owner,
        name,
        params,
        body,
    })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, CoqlError> {
        Ok(Parser {
            tokens: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, offset: usize) -> &TokenKind {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn here(&self) -> (u32, u32) {
        let t = &self.tokens[self.pos];
        (t.line, t.col)
    }

    fn advance(&mut self) -> TokenKind {
        let kind = self.tokens[self.pos].kind.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        kind
    }

    fn eat_if(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> CoqlError {
        let t = &self.tokens[self.pos];
        CoqlError::Parse {
            line: t.line,
            col: t.col,
            expected: expected.to_string(),
            found: t.kind.to_string(),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), CoqlError> {
        if self.peek() == &kind {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&kind.to_string()))
        }
    }

    fn expect_eof(&self) -> Result<(), CoqlError> {
        if matches!(self.peek(), TokenKind::Eof) {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn ident(&mut self, expected: &str) -> Result<Ident, CoqlError> {
        let (line, col) = self.here();
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                self.advance();
                Ok(Ident { name, line, col })
            }
            _ => Err(self.error(expected)),
        }
    }

    // ------------------------------------------------------------------
    // queries

    fn query(&mut self) -> Result<Query, CoqlError> {
        match self.peek() {
            TokenKind::Forall => {
                self.advance();
                let sources = self.sources()?;
                let body = self.block()?;
                Ok(Query {
                    forall: true,
                    sources,
                    body,
                    where_clause: None,
                    select: None,
                })
            }
            TokenKind::Select => {
                // SQL-style sugar: SELECT list FROM sources [WHERE cond]
                self.advance();
                let select = self.select_clause_tail()?;
                self.expect(TokenKind::From)?;
                let sources = self.sources()?;
                let where_clause = if self.eat_if(&TokenKind::Where) {
                    Some(self.expr()?)
                } else {
                    None
                };
                Ok(Query {
                    forall: false,
                    sources,
                    body: Vec::new(),
                    where_clause,
                    select: Some(select),
                })
            }
            TokenKind::From => {
                self.advance();
                let sources = self.sources()?;
                let body = if matches!(self.peek(), TokenKind::LBrace) {
                    self.block()?
                } else {
                    Vec::new()
                };
                let where_clause = if self.eat_if(&TokenKind::Where) {
                    Some(self.expr()?)
                } else {
                    None
                };
                let select = if self.eat_if(&TokenKind::Select) {
                    Some(self.select_clause_tail()?)
                } else {
                    None
                };
                Ok(Query {
                    forall: false,
                    sources,
                    body,
                    where_clause,
                    select,
                })
            }
            _ => Err(self.error("FROM, FORALL or SELECT")),
        }
    }

    /// The part after the SELECT keyword.
    fn select_clause_tail(&mut self) -> Result<SelectClause, CoqlError> {
        if self.eat_if(&TokenKind::Star) {
            return Ok(SelectClause::Star);
        }
        // Try a parenthesized select list first: `SELECT (a, b)`.
        if matches!(self.peek(), TokenKind::LParen) {
            let save = self.pos;
            self.advance();
            if let Ok(items) = self.select_items() {
                if self.eat_if(&TokenKind::RParen) && self.at_clause_boundary() {
                    return Ok(SelectClause::Exprs(items));
                }
            }
            self.pos = save;
        }
        Ok(SelectClause::Exprs(self.select_items()?))
    }

    fn at_clause_boundary(&self) -> bool {
        matches!(
            self.peek(),
            TokenKind::Eof
                | TokenKind::Where
                | TokenKind::Select
                | TokenKind::From
                | TokenKind::Semi
                | TokenKind::RParen
                | TokenKind::RBrace
        )
    }

    fn select_items(&mut self) -> Result<Vec<SelectItem>, CoqlError> {
        let mut items = Vec::new();
        loop {
            let expr = self.expr()?;
            let alias = if self.eat_if(&TokenKind::As) {
                Some(self.ident("column alias")?)
            } else {
                None
            };
            items.push(SelectItem { expr, alias });
            if !self.eat_if(&TokenKind::Comma) {
                break;
            }
        }
        Ok(items)
    }

    fn sources(&mut self) -> Result<Vec<Source>, CoqlError> {
        if matches!(self.peek(), TokenKind::LParen) {
            // Try `( source, source, ... )`; on failure fall back to a
            // single parenthesized collection expression.
            let save = self.pos;
            self.advance();
            let mut sources = Vec::new();
            let list_ok = loop {
                match self.source() {
                    Ok(src) => sources.push(src),
                    Err(_) => break false,
                }
                if self.eat_if(&TokenKind::Comma) {
                    continue;
                }
                break self.eat_if(&TokenKind::RParen) && self.at_source_list_boundary();
            };
            if list_ok {
                return Ok(sources);
            }
            self.pos = save;
        }
        Ok(vec![self.source()?])
    }

    fn at_source_list_boundary(&self) -> bool {
        matches!(
            self.peek(),
            TokenKind::Eof
                | TokenKind::Where
                | TokenKind::Select
                | TokenKind::LBrace
                | TokenKind::Semi
                | TokenKind::RParen
        )
    }

    fn source(&mut self) -> Result<Source, CoqlError> {
        let expr = self.expr()?;
        let var = match self.peek().clone() {
            TokenKind::Ident(name) => {
                let (line, col) = self.here();
                self.advance();
                Some(Ident { name, line, col })
            }
            _ => None,
        };
        Ok(Source { expr, var })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, CoqlError> {
        self.expect(TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat_if(&TokenKind::RBrace) {
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, CoqlError> {
        match self.peek().clone() {
            TokenKind::Return => {
                self.advance();
                let exprs = self.return_list()?;
                self.expect(TokenKind::Semi)?;
                Ok(Stmt::Return(exprs))
            }
            TokenKind::If => {
                self.advance();
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                self.eat_if(&TokenKind::Then);
                self.expect(TokenKind::Return)?;
                let exprs = self.return_list()?;
                self.expect(TokenKind::Semi)?;
                Ok(Stmt::If {
                    cond,
                    then_return: exprs,
                })
            }
            TokenKind::Collection => {
                self.advance();
                let of = if self.eat_if(&TokenKind::Lt) {
                    let c = self.ident("concept name")?;
                    self.expect(TokenKind::Gt)?;
                    Some(c)
                } else {
                    None
                };
                self.decl_tail(DeclType::Collection(of))
            }
            TokenKind::Item => {
                self.advance();
                self.decl_tail(DeclType::Item)
            }
            TokenKind::Double => {
                self.advance();
                self.decl_tail(DeclType::Double)
            }
            TokenKind::Integer => {
                self.advance();
                self.decl_tail(DeclType::Integer)
            }
            TokenKind::Ident(_) => {
                let ty = self.ident("declaration type")?;
                self.decl_tail(DeclType::Concept(ty))
            }
            _ => Err(self.error("statement (declaration, IF or RETURN)")),
        }
    }

    fn decl_tail(&mut self, ty: DeclType) -> Result<Stmt, CoqlError> {
        let name = self.ident("variable name")?;
        self.expect(TokenKind::Assign)?;
        let value = self.expr()?;
        self.expect(TokenKind::Semi)?;
        Ok(Stmt::Decl { ty, name, value })
    }

    fn return_list(&mut self) -> Result<Vec<Expr>, CoqlError> {
        if matches!(self.peek(), TokenKind::LParen) {
            // Prefer the parenthesized list form; `RETURN (a, b);`
            let save = self.pos;
            self.advance();
            let mut exprs = Vec::new();
            let ok = loop {
                match self.expr() {
                    Ok(e) => exprs.push(e),
                    Err(_) => break false,
                }
                if self.eat_if(&TokenKind::Comma) {
                    continue;
                }
                break self.eat_if(&TokenKind::RParen) && matches!(self.peek(), TokenKind::Semi);
            };
            if ok {
                return Ok(exprs);
            }
            self.pos = save;
        }
        let mut exprs = vec![self.expr()?];
        while self.eat_if(&TokenKind::Comma) {
            exprs.push(self.expr()?);
        }
        Ok(exprs)
    }

    // ------------------------------------------------------------------
    // expressions, precedence climbing

    fn expr(&mut self) -> Result<Expr, CoqlError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, CoqlError> {
        let mut lhs = self.and_expr()?;
        while self.eat_if(&TokenKind::Or) {
            let rhs = self.and_expr()?;
            lhs = Expr::Binary {
                op: BinOp::Or,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, CoqlError> {
        let mut lhs = self.not_expr()?;
        while self.eat_if(&TokenKind::And) {
            let rhs = self.not_expr()?;
            lhs = Expr::Binary {
                op: BinOp::And,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr, CoqlError> {
        if self.eat_if(&TokenKind::Not) {
            Ok(Expr::Not(Box::new(self.not_expr()?)))
        } else {
            self.cmp_expr()
        }
    }

    fn cmp_expr(&mut self) -> Result<Expr, CoqlError> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            TokenKind::Eq => BinOp::Eq,
            TokenKind::Ne => BinOp::Ne,
            TokenKind::Le => BinOp::Le,
            TokenKind::Ge => BinOp::Ge,
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Gt => BinOp::Gt,
            _ => return Ok(lhs),
        };
        self.advance();
        let rhs = self.add_expr()?;
        Ok(Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        })
    }

    fn add_expr(&mut self) -> Result<Expr, CoqlError> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.mul_expr()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn mul_expr(&mut self) -> Result<Expr, CoqlError> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => break,
            };
            self.advance();
            let rhs = self.unary_expr()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> Result<Expr, CoqlError> {
        if self.eat_if(&TokenKind::Minus) {
            Ok(Expr::Neg(Box::new(self.unary_expr()?)))
        } else {
            self.postfix_expr()
        }
    }

    fn postfix_expr(&mut self) -> Result<Expr, CoqlError> {
        let mut expr = self.primary()?;
        loop {
            match self.peek() {
                TokenKind::Arrow => {
                    self.advance();
                    let dim = self.ident("dimension name after ->")?;
                    expr = Expr::Step {
                        recv: Box::new(expr),
                        step: Step::Project(dim),
                    };
                }
                TokenKind::Dot => {
                    self.advance();
                    if self.eat_if(&TokenKind::Lt) {
                        // `.< e1, e2, ... >`; members parsed below the
                        // comparison level so `>` closes the tuple.
                        let mut exprs = vec![self.add_expr()?];
                        while self.eat_if(&TokenKind::Comma) {
                            exprs.push(self.add_expr()?);
                        }
                        self.expect(TokenKind::Gt)?;
                        expr = Expr::Step {
                            recv: Box::new(expr),
                            step: Step::DotTuple(exprs),
                        };
                    } else {
                        let name = self.ident("dimension or property name after .")?;
                        if matches!(self.peek(), TokenKind::LParen) {
                            self.advance();
                            let mut args = Vec::new();
                            if !self.eat_if(&TokenKind::RParen) {
                                loop {
                                    args.push(self.expr()?);
                                    if !self.eat_if(&TokenKind::Comma) {
                                        break;
                                    }
                                }
                                self.expect(TokenKind::RParen)?;
                            }
                            expr = Expr::Call {
                                recv: Box::new(expr),
                                name,
                                args,
                            };
                        } else {
                            expr = Expr::Step {
                                recv: Box::new(expr),
                                step: Step::Dot(name),
                            };
                        }
                    }
                }
                TokenKind::BackArrow => {
                    let mut items = Vec::new();
                    while self.eat_if(&TokenKind::BackArrow) {
                        items.push(self.deproj_item()?);
                    }
                    expr = Expr::Step {
                        recv: Box::new(expr),
                        step: Step::Deproject(items),
                    };
                }
                _ => break,
            }
        }
        Ok(expr)
    }

    fn deproj_item(&mut self) -> Result<DeprojItem, CoqlError> {
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                let (line, col) = self.here();
                self.advance();
                Ok(DeprojItem::Name(Ident { name, line, col }))
            }
            TokenKind::LParen | TokenKind::LBracket => Ok(DeprojItem::Target(self.primary()?)),
            _ => Err(self.error("dimension name or parenthesized target in de-projection chain")),
        }
    }

    fn primary(&mut self) -> Result<Expr, CoqlError> {
        match self.peek().clone() {
            TokenKind::Int(v) => {
                self.advance();
                Ok(Expr::Int(v))
            }
            TokenKind::Dec(text) => {
                self.advance();
                Ok(Expr::Dec(text))
            }
            TokenKind::Str(text) => {
                self.advance();
                Ok(Expr::Str(text))
            }
            TokenKind::This => {
                self.advance();
                Ok(Expr::This)
            }
            TokenKind::Ident(name) => {
                let (line, col) = self.here();
                self.advance();
                Ok(Expr::Name(Ident { name, line, col }))
            }
            TokenKind::Count | TokenKind::Sum | TokenKind::Average | TokenKind::Size => {
                let func = match self.advance() {
                    TokenKind::Count => AggFunc::Count,
                    TokenKind::Sum => AggFunc::Sum,
                    TokenKind::Average => AggFunc::Average,
                    TokenKind::Size => AggFunc::Size,
                    _ => unreachable!(),
                };
                self.expect(TokenKind::LParen)?;
                let arg = self.expr_or_query()?;
                self.expect(TokenKind::RParen)?;
                Ok(Expr::Aggregate {
                    func,
                    arg: Box::new(arg),
                })
            }
            TokenKind::LParen => {
                self.advance();
                if matches!(
                    self.peek(),
                    TokenKind::From | TokenKind::Forall | TokenKind::Select
                ) {
                    let q = self.query()?;
                    self.expect(TokenKind::RParen)?;
                    return Ok(Expr::Subquery(Box::new(q)));
                }
                let inner = self.expr()?;
                // `( coll var? | cond )` is a filter; a bare `( expr )`
                // is just grouping.
                let var = match self.peek().clone() {
                    TokenKind::Ident(name) if matches!(self.peek_at(1), TokenKind::Bar) => {
                        let (line, col) = self.here();
                        self.advance();
                        Some(Ident { name, line, col })
                    }
                    _ => None,
                };
                if self.eat_if(&TokenKind::Bar) {
                    let cond = self.expr()?;
                    self.expect(TokenKind::RParen)?;
                    Ok(Expr::Filter {
                        source: Box::new(inner),
                        var,
                        cond: Box::new(cond),
                    })
                } else {
                    self.expect(TokenKind::RParen)?;
                    Ok(inner)
                }
            }
            TokenKind::LBracket => {
                self.advance();
                // chains separated by AND, parsed below the AND level
                let mut chains = vec![self.cmp_expr()?];
                while self.eat_if(&TokenKind::And) {
                    chains.push(self.cmp_expr()?);
                }
                self.expect(TokenKind::RBracket)?;
                Ok(Expr::MultiDeproject(chains))
            }
            _ => Err(self.error("expression")),
        }
    }

    /// Aggregate arguments may be whole queries without parentheses:
    /// `AVERAGE( SELECT age FROM Employees )`.
    fn expr_or_query(&mut self) -> Result<Expr, CoqlError> {
        if matches!(
            self.peek(),
            TokenKind::From | TokenKind::Forall | TokenKind::Select
        ) {
            Ok(Expr::Subquery(Box::new(self.query()?)))
        } else {
            self.expr()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_star_both_orders() {
        let a = parse_query("SELECT * FROM Employees").unwrap();
        let b = parse_query("FROM Employees SELECT *").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.select, Some(SelectClause::Star));
        assert_eq!(a.sources.len(), 1);
    }

    #[test]
    fn filter_with_implicit_variable() {
        let e = parse_expr_text("(Employees | age == 30)").unwrap();
        match e {
            Expr::Filter { source, var, .. } => {
                assert_eq!(*source, Expr::Name(Ident::new("Employees")));
                assert!(var.is_none());
            }
            other => panic!("expected filter, got {other:?}"),
        }
        let e = parse_expr_text("(Employees emp | emp.age == 30)").unwrap();
        match e {
            Expr::Filter { var, .. } => assert_eq!(var, Some(Ident::new("emp"))),
            other => panic!("expected filter, got {other:?}"),
        }
    }

    #[test]
    fn deprojection_chain() {
        let e = parse_expr_text("e <- employee <- order <- (OrderParts | dish.category == 'pizza')")
            .unwrap();
        match e {
            Expr::Step {
                step: Step::Deproject(items),
                ..
            } => {
                assert_eq!(items.len(), 3);
                assert!(matches!(items[0], DeprojItem::Name(_)));
                assert!(matches!(items[2], DeprojItem::Target(_)));
            }
            other => panic!("expected deproject step, got {other:?}"),
        }
    }

    #[test]
    fn cartesian_sources() {
        let q = parse_query("FROM ( Projects project, Personnel person ) SELECT ( project.name, person.name )")
            .unwrap();
        assert_eq!(q.sources.len(), 2);
        assert_eq!(q.sources[0].var, Some(Ident::new("project")));
        match &q.select {
            Some(SelectClause::Exprs(items)) => assert_eq!(items.len(), 2),
            other => panic!("expected select exprs, got {other:?}"),
        }
    }

    #[test]
    fn forall_block() {
        let q = parse_query(
            "FORALL ( Projects project, Personnel person ) { \
             IF ( person.age > 30 AND project.budget < 20 ) \
             RETURN (project.name, person.name ); }",
        )
        .unwrap();
        assert!(q.forall);
        assert_eq!(q.body.len(), 1);
        assert!(matches!(q.body[0], Stmt::If { .. }));
    }

    #[test]
    fn body_declarations() {
        let q = parse_query(
            "FROM Employees e { \
             Collection group = e <- employee <- Orders; \
             double total = SUM( group.<count * dish.price> ); } \
             WHERE COUNT( group ) > 3 AND total < 200 \
             SELECT e.name, total",
        )
        .unwrap();
        assert_eq!(q.body.len(), 2);
        assert!(matches!(
            q.body[0],
            Stmt::Decl {
                ty: DeclType::Collection(None),
                ..
            }
        ));
        assert!(matches!(q.body[1], Stmt::Decl { ty: DeclType::Double, .. }));
    }

    #[test]
    fn multi_deprojection_brackets() {
        let e = parse_expr_text(
            "[ cntr <- country <- customer <- order <- OrderParts \
             AND ctgr <- category <- product <- OrderParts ]",
        )
        .unwrap();
        match e {
            Expr::MultiDeproject(chains) => assert_eq!(chains.len(), 2),
            other => panic!("expected multi-deprojection, got {other:?}"),
        }
    }

    #[test]
    fn incomplete_input_errors_with_position() {
        let err = parse_query("FROM Employees e WHERE e.age >").unwrap_err();
        match err {
            CoqlError::Parse { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col > 25);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn typed_declarations_and_calls() {
        let q = parse_query(
            "FROM Employees e { Collection<Employees> peers = (Employees | age == 30); \
             Item n = e.name; } SELECT e.name, COUNT(e.orders('pizza'))",
        )
        .unwrap();
        assert_eq!(q.body.len(), 2);
        match &q.select {
            Some(SelectClause::Exprs(items)) => {
                assert!(matches!(items[1].expr, Expr::Aggregate { .. }));
            }
            other => panic!("unexpected select {other:?}"),
        }
    }

    #[test]
    fn nested_subquery() {
        let q = parse_query("SELECT * FROM (SELECT * FROM Employees) WHERE age > 30").unwrap();
        assert!(matches!(q.sources[0].expr, Expr::Subquery(_)));
    }
}
