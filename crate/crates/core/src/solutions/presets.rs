//! Parameter sets of the five published density snapshots.

use super::SolutionClass;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigurePreset {
    pub name: &'static str,
    pub alpha: f64,
    pub class: SolutionClass,
    pub times: [f64; 3],
}

pub const FIGURE_PRESETS: [FigurePreset; 5] = [
    FigurePreset {
        name: "fig1",
        alpha: 2.0,
        class: SolutionClass::ClassI { z1: 1.0, z2: 4.0, a1: 1.0, a2: 0.5 },
        times: [0.3, 0.4, 0.5],
    },
    FigurePreset {
        name: "fig2",
        alpha: -2.0,
        class: SolutionClass::ClassI { z1: 1.0, z2: 4.0, a1: 1.0 / 3.0, a2: 0.5 },
        times: [1.0, 1.2, 1.4],
    },
    FigurePreset {
        name: "fig3",
        alpha: 2.0,
        class: SolutionClass::ClassI { z1: -2.0, z2: 4.0, a1: 1.0, a2: 1.0 },
        times: [0.6, 0.8, 1.0],
    },
    FigurePreset {
        name: "fig4",
        alpha: 2.0,
        class: SolutionClass::ClassII { z2: 1.0, a1: 1.0, a2: 0.5, beta: -1.0 },
        times: [0.4, 0.6, 0.8],
    },
    FigurePreset {
        name: "fig5",
        alpha: 2.0,
        class: SolutionClass::ClassIII { z1: 0.5, a1: 1.0, a2: 0.5, beta: 1.0 },
        times: [0.5, 0.8, 1.0],
    },
];

pub fn figure_preset(name: &str) -> Option<FigurePreset> {
    FIGURE_PRESETS.iter().copied().find(|p| p.name.eq_ignore_ascii_case(name))
}
