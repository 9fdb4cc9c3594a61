//! Versioned prompt templates. Placeholders are written `{{name}}`; the
//! template reference (`id@version`) is stored with every transcript entry.

use crate::gateway::Message;

pub const VERSION: &str = "v1";

const SYSTEM: &str = "You are an experienced Java developer who helps test static analysis tools. Follow the requested reply format exactly.";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    SeedGenerate,
    SeedRepair,
    TestGenerate,
    TestRepair,
    TestRefine,
    Judge,
    MutantApplicability,
    MutantGenerate,
    MutantRepair,
    MutantRefine,
}

impl Template {
    pub const ALL: [Template; 10] = [
        Template::SeedGenerate,
        Template::SeedRepair,
        Template::TestGenerate,
        Template::TestRepair,
        Template::TestRefine,
        Template::Judge,
        Template::MutantApplicability,
        Template::MutantGenerate,
        Template::MutantRepair,
        Template::MutantRefine,
    ];

    /// Pipeline step name, also used as the request purpose.
    pub fn id(self) -> &'static str {
        match self {
            Template::SeedGenerate => "seed.generate",
            Template::SeedRepair => "seed.repair",
            Template::TestGenerate => "test.generate",
            Template::TestRepair => "test.repair",
            Template::TestRefine => "test.refine",
            Template::Judge => "test.judge",
            Template::MutantApplicability => "mutant.applicability",
            Template::MutantGenerate => "mutant.generate",
            Template::MutantRepair => "mutant.repair",
            Template::MutantRefine => "mutant.refine",
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            Template::SeedGenerate => include_str!("../prompts/seed_generate.txt"),
            Template::SeedRepair => include_str!("../prompts/seed_repair.txt"),
            Template::TestGenerate => include_str!("../prompts/test_generate.txt"),
            Template::TestRepair => include_str!("../prompts/test_repair.txt"),
            Template::TestRefine => include_str!("../prompts/test_refine.txt"),
            Template::Judge => include_str!("../prompts/judge.txt"),
            Template::MutantApplicability => include_str!("../prompts/mutant_applicability.txt"),
            Template::MutantGenerate => include_str!("../prompts/mutant_generate.txt"),
            Template::MutantRepair => include_str!("../prompts/mutant_repair.txt"),
            Template::MutantRefine => include_str!("../prompts/mutant_refine.txt"),
        }
    }

    pub fn reference(self) -> String {
        format!("{}@{VERSION}", self.id())
    }

    pub fn placeholders(self) -> Vec<&'static str> {
        let t = self.text();
        let mut out = Vec::new();
        let mut rest = t;
        while let Some(i) = rest.find("{{") {
            let after = &rest[i + 2..];
            let Some(j) = after.find("}}") else { break };
            let name = &after[..j];
            if !out.contains(&name) {
                out.push(name);
            }
            rest = &after[j + 2..];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prompt {
    pub template: Template,
    pub messages: Vec<Message>,
}

/// Fills a template; every placeholder must be supplied.
pub fn render(template: Template, vars: &[(&str, &str)]) -> Prompt {
    let mut text = template.text().to_string();
    for name in template.placeholders() {
        let value = vars.iter().find(|(k, _)| *k == name).map(|(_, v)| *v);
        let value = value.unwrap_or_else(|| panic!("template {} needs `{name}`", template.id()));
        text = text.replace(&format!("{{{{{name}}}}}"), value.trim_end_matches('\n'));
    }
    Prompt { template, messages: vec![Message::system(SYSTEM), Message::user(text)] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_template_renders_completely() {
        for t in Template::ALL {
            let names = t.placeholders();
            let vars: Vec<(&str, &str)> = names.iter().map(|n| (*n, "X")).collect();
            let p = render(t, &vars);
            assert!(!p.messages[1].text.contains("{{"), "{}", t.id());
        }
    }

    #[test]
    fn seed_prompt_carries_constraints() {
        let t = Template::SeedGenerate.text();
        assert!(t.contains("compile without errors"));
        assert!(t.contains("{{entry}}"));
        assert!(t.contains("standard library"));
        assert!(t.contains("BUGGY_LINES"));
    }
}
