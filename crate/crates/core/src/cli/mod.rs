//! File formats and the command front end.

mod parse;
mod run;

pub use parse::{format_instance, format_template, parse_instance, parse_template, Template};
pub use run::{parse_kl, run, Command, Flags, Report};
