use std::collections::{BTreeSet, HashMap};

use super::ast::*;
use super::lexer::{SourceSpan, Tok};
use super::parser::Parser;
use super::LangError;
use crate::model::GuardedModel;

pub fn parse_model(text: &str) -> Result<GuardedModel, LangError> {
    let mut p = Parser::new(text, false)?;
    if !p.eat_keyword("dtmc") {
        if p.is_keyword("mdp") || p.is_keyword("ctmc") {
            return Err(p.error("only dtmc models are supported"));
        }
        return Err(p.unexpected("'dtmc'"));
    }

    let mut constants = Vec::new();
    while p.is_keyword("const") {
        constants.push(parse_const(&mut p)?);
    }

    p.expect_keyword("module")?;
    let (module_name, _) = p.ident("a module name")?;
    let mut variables = Vec::new();
    let mut commands = Vec::new();
    loop {
        match p.peek() {
            Tok::Ident(s) if s == "endmodule" => {
                p.bump();
                break;
            }
            Tok::LBracket => commands.push(parse_command(&mut p)?),
            Tok::Ident(_) if *p.peek_at(1) == Tok::Colon => {
                if !commands.is_empty() {
                    return Err(p.error("variable declarations must precede commands"));
                }
                variables.push(parse_var(&mut p)?);
            }
            _ => return Err(p.unexpected("a variable declaration, a command or 'endmodule'")),
        }
    }

    let mut rewards = Vec::new();
    while p.eat_keyword("rewards") {
        let label = match p.peek().clone() {
            Tok::Str(s) => {
                p.bump();
                s
            }
            _ => return Err(p.unexpected("a quoted reward label")),
        };
        let mut items = Vec::new();
        while !p.eat_keyword("endrewards") {
            if *p.peek() == Tok::LBracket {
                return Err(p.error("transition rewards are not supported"));
            }
            let guard = p.expr()?;
            p.expect(Tok::Colon, "':'")?;
            let value = p.expr()?;
            p.expect(Tok::Semi, "';'")?;
            items.push(RewardItem { guard, value });
        }
        rewards.push(RewardDecl { label, items });
    }
    if !p.at_eof() {
        return Err(p.unexpected("'rewards' or end of input"));
    }

    let mut model = GuardedModel {
        constants,
        module_name,
        variables,
        commands,
        rewards,
        warnings: Vec::new(),
        source: text.to_string(),
    };
    check_names(&mut model)?;
    Ok(model)
}

fn parse_const(p: &mut Parser) -> Result<ConstDecl, LangError> {
    let start = p.expect_keyword("const")?;
    let ty = if p.eat_keyword("double") {
        ConstType::Double
    } else if p.eat_keyword("bool") {
        ConstType::Bool
    } else {
        // PRISM defaults untyped constants to int
        p.eat_keyword("int");
        ConstType::Int
    };
    let (name, _) = p.ident("a constant name")?;
    let value = if p.eat(&Tok::Eq) { Some(p.expr()?) } else { None };
    p.expect(Tok::Semi, "';'")?;
    Ok(ConstDecl {
        name,
        ty,
        value,
        span: start.to(p.prev_span()),
    })
}

fn parse_var(p: &mut Parser) -> Result<VarDecl, LangError> {
    let (name, start) = p.ident("a variable name")?;
    p.expect(Tok::Colon, "':'")?;
    let domain = if p.eat_keyword("bool") {
        VarDomain::Bool
    } else {
        p.expect(Tok::LBracket, "'[' or 'bool'")?;
        let lo = p.expr()?;
        p.expect(Tok::DotDot, "'..'")?;
        let hi = p.expr()?;
        p.expect(Tok::RBracket, "']'")?;
        VarDomain::Range(lo, hi)
    };
    p.expect_keyword("init")?;
    let init = p.expr()?;
    p.expect(Tok::Semi, "';'")?;
    Ok(VarDecl {
        name,
        domain,
        init,
        span: start.to(p.prev_span()),
    })
}

fn parse_command(p: &mut Parser) -> Result<Command, LangError> {
    let start = p.expect(Tok::LBracket, "'['")?;
    if *p.peek() != Tok::RBracket {
        return Err(p.error("synchronising actions are not supported; use '[]'"));
    }
    p.bump();
    let guard = p.expr()?;
    p.expect(Tok::Arrow, "'->'")?;
    let mut branches = Vec::new();
    loop {
        branches.push(parse_branch(p)?);
        if !p.eat(&Tok::Plus) {
            break;
        }
    }
    p.expect(Tok::Semi, "';'")?;
    Ok(Command {
        guard,
        branches,
        span: start.to(p.prev_span()),
    })
}

fn parse_branch(p: &mut Parser) -> Result<Branch, LangError> {
    // A branch without an explicit probability is an update list with probability one.
    let implicit = p.is_keyword("true")
        || (*p.peek() == Tok::LParen
            && matches!(p.peek_at(1), Tok::Ident(_))
            && *p.peek_at(2) == Tok::Prime);
    let prob = if implicit {
        Expr::new(
            ExprKind::Num {
                value: num_rational::BigRational::from_integer(1.into()),
                text: "1".into(),
            },
            p.span(),
        )
    } else {
        let e = p.expr()?;
        p.expect(Tok::Colon, "':'")?;
        e
    };
    let mut updates = Vec::new();
    if !p.eat_keyword("true") {
        loop {
            let start = p.expect(Tok::LParen, "'(' starting an update")?;
            let (var, _) = p.ident("a variable name")?;
            p.expect(Tok::Prime, "'''")?;
            p.expect(Tok::Eq, "'='")?;
            let value = p.expr()?;
            let end = p.expect(Tok::RParen, "')'")?;
            updates.push(Update {
                var,
                value,
                span: start.to(end),
            });
            if !p.eat(&Tok::And) {
                break;
            }
        }
    }
    Ok(Branch { prob, updates })
}

#[derive(Clone, Copy, PartialEq)]
enum NameKind {
    Const,
    Var,
}

fn check_names(model: &mut GuardedModel) -> Result<(), LangError> {
    let mut names: HashMap<String, NameKind> = HashMap::new();
    let mut used: BTreeSet<String> = BTreeSet::new();

    let check = |e: &Expr,
                     names: &HashMap<String, NameKind>,
                     allow_vars: bool,
                     used: &mut BTreeSet<String>|
     -> Result<(), LangError> {
        let mut err = None;
        e.for_each_ident(&mut |n, span| {
            if err.is_some() {
                return;
            }
            match names.get(n) {
                Some(NameKind::Var) if !allow_vars => {
                    err = Some(LangError::UnknownIdentifier {
                        name: n.to_string(),
                        span,
                    })
                }
                Some(_) => {
                    used.insert(n.to_string());
                }
                None => {
                    err = Some(LangError::UnknownIdentifier {
                        name: n.to_string(),
                        span,
                    })
                }
            }
        });
        if let Some(ExprKind::Label(l)) = find_label(e) {
            return Err(LangError::Syntax {
                span: e.span,
                message: format!("quoted label \"{l}\" is only allowed in properties"),
            });
        }
        err.map_or(Ok(()), Err)
    };

    for c in &model.constants {
        if let Some(v) = &c.value {
            check(v, &names, false, &mut used)?;
        }
        if names.insert(c.name.clone(), NameKind::Const).is_some() {
            return Err(LangError::DuplicateName {
                name: c.name.clone(),
                span: c.span,
            });
        }
    }
    for v in &model.variables {
        if let VarDomain::Range(lo, hi) = &v.domain {
            check(lo, &names, false, &mut used)?;
            check(hi, &names, false, &mut used)?;
        }
        check(&v.init, &names, false, &mut used)?;
        if names.insert(v.name.clone(), NameKind::Var).is_some() {
            return Err(LangError::DuplicateName {
                name: v.name.clone(),
                span: v.span,
            });
        }
    }
    for cmd in &model.commands {
        check(&cmd.guard, &names, true, &mut used)?;
        for b in &cmd.branches {
            check(&b.prob, &names, true, &mut used)?;
            let mut seen = BTreeSet::new();
            for u in &b.updates {
                if names.get(&u.var) != Some(&NameKind::Var) {
                    return Err(LangError::UnknownIdentifier {
                        name: u.var.clone(),
                        span: u.span,
                    });
                }
                if !seen.insert(u.var.clone()) {
                    return Err(LangError::DuplicateName {
                        name: u.var.clone(),
                        span: u.span,
                    });
                }
                check(&u.value, &names, true, &mut used)?;
            }
        }
    }
    let mut labels = BTreeSet::new();
    for r in &model.rewards {
        if !labels.insert(r.label.clone()) {
            return Err(LangError::DuplicateName {
                name: r.label.clone(),
                span: SourceSpan::default(),
            });
        }
        for item in &r.items {
            check(&item.guard, &names, true, &mut used)?;
            check(&item.value, &names, true, &mut used)?;
        }
    }

    model.warnings = model
        .constants
        .iter()
        .filter(|c| !used.contains(&c.name))
        .map(|c| Diagnostic {
            span: c.span,
            message: format!("unused parameter {}", c.name),
        })
        .collect();
    Ok(())
}

fn find_label(e: &Expr) -> Option<&ExprKind> {
    match &e.kind {
        ExprKind::Label(_) => Some(&e.kind),
        ExprKind::Unary(_, a) => find_label(a),
        ExprKind::Binary(_, a, b) => find_label(a).or_else(|| find_label(b)),
        _ => None,
    }
}

