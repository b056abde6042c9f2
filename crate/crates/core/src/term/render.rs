//! Canonical DSL rendering. `parse(render(x)) == x` for systems, dispersion
//! specs and graphs.

use std::fmt::{self, Display, Formatter, Write};

use super::{Assignment, DispersionSpec, Equation, Interpretation, Signature, Term, TermSystem};
use crate::depgraph::DependencyGraph;

/// Renders any domain value to its canonical text form.
pub fn render(obj: &impl Display) -> String {
    obj.to_string()
}

fn join<T: Display>(f: &mut Formatter<'_>, items: impl IntoIterator<Item = T>) -> fmt::Result {
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_char(',')?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_char(')')
            }
        }
    }
}

impl Display for Equation {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

impl Display for Signature {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        join(f, self.symbols())
    }
}

fn sig_line(f: &mut Formatter<'_>, sig: &Signature) -> fmt::Result {
    if sig.is_empty() {
        writeln!(f, "  sig ;")
    } else {
        writeln!(f, "  sig {sig};")
    }
}

fn id_line(f: &mut Formatter<'_>, kw: &str, ids: &[String]) -> fmt::Result {
    if ids.is_empty() {
        writeln!(f, "  {kw} ;")
    } else {
        write!(f, "  {kw} ")?;
        join(f, ids)?;
        writeln!(f, ";")
    }
}

impl Display for TermSystem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance {{")?;
        id_line(f, "vars", self.variables())?;
        sig_line(f, self.signature())?;
        for eq in self.equations() {
            writeln!(f, "  eq {eq};")?;
        }
        writeln!(f, "}}")
    }
}

impl Display for DispersionSpec {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "dispersion {{")?;
        id_line(f, "inputs", self.inputs())?;
        sig_line(f, self.signature())?;
        write!(f, "  outputs ")?;
        join(f, self.outputs())?;
        writeln!(f, ";")?;
        writeln!(f, "}}")
    }
}

impl Display for DependencyGraph {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph {{")?;
        id_line(f, "nodes", self.vertices())?;
        let sources: Vec<String> = self.source_names().map(str::to_owned).collect();
        id_line(f, "sources", &sources)?;
        for (u, v) in self.edge_names() {
            writeln!(f, "  edge {u} -> {v};")?;
        }
        writeln!(f, "}}")
    }
}

impl Display for Interpretation {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "interpretation n={} {{", self.n())?;
        for (name, table) in self.tables() {
            write!(f, "  {name}/{}: [", table.arity)?;
            for (i, v) in table.values.iter().enumerate() {
                if i > 0 {
                    f.write_char(' ')?;
                }
                write!(f, "{v}")?;
            }
            writeln!(f, "]")?;
        }
        writeln!(f, "}}")
    }
}

impl Display for Assignment {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        join(f, self.iter().map(|(k, v)| format!("{k}={v}")))?;
        f.write_char('}')
    }
}
