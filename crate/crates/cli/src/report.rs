//! Line-oriented `key: value` reports.

#[derive(Clone, Debug, Default)]
pub struct Report {
    lines: Vec<String>,
    verbose: bool,
}

impl Report {
    pub fn new(verbose: bool) -> Self {
        Report { lines: Vec::new(), verbose }
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    /// Prose for `--verbose`, written as comment lines so keyed lines stay parseable.
    pub fn note(&mut self, text: impl AsRef<str>) {
        if self.verbose {
            for l in text.as_ref().lines() {
                self.lines.push(format!("# {l}"));
            }
        }
    }

    pub fn raw(&mut self, text: &str) {
        self.lines.extend(text.lines().map(str::to_string));
    }

    pub fn verbose(&self) -> bool {
        self.verbose
    }

    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        if !s.is_empty() {
            s.push('\n');
        }
        s
    }
}

pub fn list<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
