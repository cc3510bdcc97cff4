use std::io::IsTerminal;

/// ANSI colouring, off when stdout is not a terminal or `RETUNE_COLOR=0`.
pub struct Painter {
    enabled: bool,
}

impl Painter {
    pub fn from_env() -> Self {
        let disabled = std::env::var("RETUNE_COLOR").is_ok_and(|v| v == "0");
        Painter {
            enabled: !disabled && std::io::stdout().is_terminal(),
        }
    }

    fn paint(&self, code: &str, s: &str) -> String {
        if self.enabled {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    pub fn green(&self, s: &str) -> String {
        self.paint("32", s)
    }

    pub fn red(&self, s: &str) -> String {
        self.paint("31", s)
    }
}
