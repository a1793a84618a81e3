//! Built-in scenarios, stored as config text.

pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3a", "fig3b", "fig3c", "fig4"];

/// Config text of a built-in scenario.
pub fn preset(name: &str) -> Option<&'static str> {
    Some(match name {
        // single-mode counting statistics in the central mode
        "fig2" => "\
lattice = 25
steps = 6
occupations = central-block:8
species = boson, distinguishable
observable = single-mode:25
",
        // conditional imbalance for a mirror-symmetric mode pair
        "fig3a" => "\
lattice = 25
steps = 20
occupations = central-block:8
species = boson, distinguishable
observable = conditional:4:19:32
observable = conditional:8:19:32
",
        // same for an asymmetric pair
        "fig3b" => "\
lattice = 25
steps = 20
occupations = central-block:8
species = boson, distinguishable
observable = conditional:4:18:32
observable = conditional:8:18:32
",
        // dependence on the particle number, m = N
        "fig3c" => "\
lattice = 25
steps = 20
occupations = central-block:4
occupations = central-block:6
occupations = central-block:8
species = boson, distinguishable
observable = conditional:N:19:32
",
        // imbalance averaged over all mode pairs at two neighbouring step counts
        "fig4" => "\
lattice = 25
steps = 19, 20
occupations = central-block:8
species = boson, distinguishable
observable = pair-averaged:N
",
        _ => return None,
    })
}
