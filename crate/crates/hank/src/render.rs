//! Warning output: plain text for humans, JSON for tooling.

use serde::Serialize;

use crate::engine::RuleResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Serialize)]
struct JsonWarning<'a> {
    file: &'a str,
    line: u32,
    rule: &'a str,
    text: &'a str,
}

/// Renders warnings in the requested format. Text output is one
/// `file:line: message` line per warning (empty string for no warnings);
/// JSON output is always a single array followed by a newline.
pub fn render(results: &[RuleResult], format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => results
            .iter()
            .map(|r| format!("{}:{}: {}\n", r.file, r.line, r.text))
            .collect(),
        OutputFormat::Json => {
            let warnings: Vec<JsonWarning> = results
                .iter()
                .map(|r| JsonWarning {
                    file: &r.file,
                    line: r.line,
                    rule: r.rule.as_str(),
                    text: &r.text,
                })
                .collect();
            let mut out = serde_json::to_string(&warnings).expect("warnings serialize");
            out.push('\n');
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{IgnorePattern, RuleId};

    fn result(file: &str, line: u32, rule: &str, text: &str) -> RuleResult {
        RuleResult {
            rule: RuleId::new(rule),
            file: file.to_string(),
            line,
            text: text.to_string(),
            pattern: IgnorePattern::File,
        }
    }

    #[test]
    fn text_format_is_one_line_per_warning() {
        let results = vec![
            result("src/a.erl", 5, "unused_macros", "?FOO is unused"),
            result("header.hrl", 0, "unused_hrl_files", "this file is unused"),
        ];
        assert_eq!(
            render(&results, OutputFormat::Text),
            "src/a.erl:5: ?FOO is unused\nheader.hrl:0: this file is unused\n"
        );
    }

    #[test]
    fn text_format_empty_is_empty() {
        assert_eq!(render(&[], OutputFormat::Text), "");
    }

    #[test]
    fn json_format_is_an_array() {
        let results = vec![result("src/a.erl", 5, "unused_macros", "?FOO is unused")];
        assert_eq!(
            render(&results, OutputFormat::Json),
            "[{\"file\":\"src/a.erl\",\"line\":5,\"rule\":\"unused_macros\",\"text\":\"?FOO is unused\"}]\n"
        );
    }

    #[test]
    fn json_format_empty_is_an_empty_array() {
        assert_eq!(render(&[], OutputFormat::Json), "[]\n");
    }
}
