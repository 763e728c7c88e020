use super::{DumpContext, DumpReport, LogMeta, Logger, LoggerError};
use crate::dsl::Args;
use crate::table::{frames_identical, Frame};

/// Reports on the console whether any step changed the data.
#[derive(Debug, Default)]
pub struct Trivial {
    changed: bool,
}

impl Trivial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_args(args: &Args) -> Result<Self, LoggerError> {
        if let Some((name, _)) = args.iter().next() {
            return Err(LoggerError::bad_argument(
                "trivial",
                format!("unexpected argument `{name}`"),
            ));
        }
        Ok(Self::new())
    }

    pub fn changed(&self) -> bool {
        self.changed
    }
}

impl Logger for Trivial {
    fn kind(&self) -> &str {
        "trivial"
    }

    fn add(&mut self, _meta: &LogMeta, input: &Frame, output: &Frame) -> Result<(), LoggerError> {
        self.changed |= !frames_identical(input, output);
        Ok(())
    }

    fn dump(&mut self, ctx: &mut DumpContext<'_>) -> Result<DumpReport, LoggerError> {
        let msg = if self.changed {
            "The data has changed\n"
        } else {
            "The data has not changed\n"
        };
        ctx.console
            .write_all(msg.as_bytes())
            .map_err(|e| LoggerError::Custom(format!("cannot write to console: {e}")))?;
        Ok(DumpReport::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Value;
    use proptest::prelude::*;
    use std::path::Path;

    fn dump(l: &mut Trivial) -> String {
        let mut out = Vec::new();
        l.dump(&mut DumpContext {
            default_target: Path::new("x"),
            base_dir: Path::new("."),
            args: &Args::new(),
            console: &mut out,
        })
        .unwrap();
        String::from_utf8(out).unwrap()
    }

    fn meta() -> LogMeta {
        LogMeta {
            expr_source: String::new(),
            srcref: None,
            step: 1,
            timestamp: "2020-05-08 15:24:36".parse().unwrap(),
        }
    }

    #[test]
    fn messages() {
        let a = Frame::from_columns([("x", vec![Value::from(1.0)])]).unwrap();
        let b = Frame::from_columns([("x", vec![Value::from(2.0)])]).unwrap();
        let mut l = Trivial::new();
        assert_eq!(dump(&mut l), "The data has not changed\n");
        l.add(&meta(), &a, &a).unwrap();
        assert_eq!(dump(&mut l), "The data has not changed\n");
        l.add(&meta(), &a, &b).unwrap();
        assert_eq!(dump(&mut l), "The data has changed\n");
    }

    proptest! {
        // Once a change is seen, the flag never goes back.
        #[test]
        fn changed_is_monotone(steps in proptest::collection::vec(any::<bool>(), 0..20)) {
            let a = Frame::from_columns([("x", vec![Value::from(1.0)])]).unwrap();
            let b = Frame::from_columns([("x", vec![Value::from(2.0)])]).unwrap();
            let mut l = Trivial::new();
            let mut seen = false;
            for differs in steps {
                l.add(&meta(), &a, if differs { &b } else { &a }).unwrap();
                seen |= differs;
                prop_assert_eq!(l.changed(), seen);
            }
        }
    }
}
