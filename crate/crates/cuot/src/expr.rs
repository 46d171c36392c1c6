//! Scalar expressions in the variables `t`, `x`, `y` (and `x0`, `x1`, …).
//!
//! Syntax and functions are those of [`exmex`]: `+ - * / ^`, `sin`, `cos`,
//! `exp`, `sqrt`, `abs`, constants `PI` and `E`.

use exmex::prelude::*;

/// A parsed expression with its variables resolved to slots.
#[derive(Debug, Clone)]
pub struct Expr {
    text: String,
    flat: FlatEx<f64>,
    slots: Vec<Var>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Var {
    Time,
    Space(usize),
}

impl Expr {
    /// Parses `text`, allowing only the time variable and `dim` spatial ones.
    pub fn parse(text: &str, dim: usize) -> Result<Self, String> {
        let flat = FlatEx::<f64>::parse(text).map_err(|e| format!("cannot parse `{text}`: {e}"))?;
        let mut slots = Vec::new();
        for name in flat.var_names() {
            let var = match name.as_str() {
                "t" => Var::Time,
                "x" => Var::Space(0),
                "y" => Var::Space(1),
                other => match other.strip_prefix('x').and_then(|k| k.parse::<usize>().ok()) {
                    Some(k) => Var::Space(k),
                    None => return Err(format!("unknown variable `{other}` in `{text}`")),
                },
            };
            if let Var::Space(k) = var {
                if k >= dim {
                    return Err(format!("variable `{name}` needs a spatial axis {k}, grid has {dim}"));
                }
            }
            slots.push(var);
        }
        Ok(Self {
            text: text.to_owned(),
            flat,
            slots,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn uses_space(&self) -> bool {
        self.slots.iter().any(|v| matches!(v, Var::Space(_)))
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> Result<f64, String> {
        let args: Vec<f64> = self
            .slots
            .iter()
            .map(|v| match v {
                Var::Time => t,
                Var::Space(k) => x[*k],
            })
            .collect();
        let value = self
            .flat
            .eval(&args)
            .map_err(|e| format!("cannot evaluate `{}`: {e}", self.text))?;
        if value.is_nan() {
            return Err(format!("`{}` is NaN at t = {t}, x = {x:?}", self.text));
        }
        Ok(value)
    }
}
