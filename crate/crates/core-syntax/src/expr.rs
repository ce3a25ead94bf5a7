use std::fmt;

/// Arithmetic expressions over integer variables: constants, variables,
/// `+`, `-`, `*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ImpExpr {
    Const(i64),
    Var(String),
    Add(Box<ImpExpr>, Box<ImpExpr>),
    Sub(Box<ImpExpr>, Box<ImpExpr>),
    Mul(Box<ImpExpr>, Box<ImpExpr>),
}

impl ImpExpr {
    pub fn var(name: impl Into<String>) -> ImpExpr {
        ImpExpr::Var(name.into())
    }

    pub fn add(a: ImpExpr, b: ImpExpr) -> ImpExpr {
        ImpExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: ImpExpr, b: ImpExpr) -> ImpExpr {
        ImpExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: ImpExpr, b: ImpExpr) -> ImpExpr {
        ImpExpr::Mul(Box::new(a), Box::new(b))
    }

    fn precedence(&self) -> u8 {
        match self {
            ImpExpr::Const(_) | ImpExpr::Var(_) => 3,
            ImpExpr::Mul(..) => 2,
            ImpExpr::Add(..) | ImpExpr::Sub(..) => 1,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
        }
        match self {
            ImpExpr::Const(n) => write!(f, "{n}")?,
            ImpExpr::Var(x) => write!(f, "{x}")?,
            // `+`/`-`/`*` parse left-associative, so the right operand needs
            // one more level of binding.
            ImpExpr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            ImpExpr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            ImpExpr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 3)?;
            }
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ImpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::ImpExpr;

    #[test]
    fn display_uses_minimal_parens() {
        // x * (y + 3) - y
        let e = ImpExpr::sub(
            ImpExpr::mul(ImpExpr::var("x"), ImpExpr::add(ImpExpr::var("y"), ImpExpr::Const(3))),
            ImpExpr::var("y"),
        );
        assert_eq!(e.to_string(), "x * (y + 3) - y");
        let f = ImpExpr::sub(ImpExpr::var("x"), ImpExpr::sub(ImpExpr::var("y"), ImpExpr::Const(1)));
        assert_eq!(f.to_string(), "x - (y - 1)");
    }
}
