//! Small languages, structures and families used throughout the examples and tests.

use crate::forb::ForbFamily;
use crate::structure::{EnumStructure, Language};

/// Graphs with two vertex types.
pub fn two_unary_language() -> Language {
    Language::symmetric(2, 2).expect("valid")
}

/// Directed graphs: value 1 is `a -> b`, value 2 is `b -> a`.
pub fn directed_language() -> Language {
    Language::with_unary_types(3, vec![0, 2, 1], 1).expect("valid")
}

fn graph(n: usize, edges: &[(usize, usize)]) -> EnumStructure {
    let entries: Vec<_> = edges.iter().map(|&(a, b)| (a, b, 1u8)).collect();
    EnumStructure::from_upper(&Language::graphs(), &vec![0; n], &entries).expect("valid graph")
}

/// One vertex.
pub fn v1() -> EnumStructure {
    graph(1, &[])
}

/// One edge.
pub fn e2() -> EnumStructure {
    graph(2, &[(0, 1)])
}

/// Triangle.
pub fn k3() -> EnumStructure {
    graph(3, &[(0, 1), (0, 2), (1, 2)])
}

/// Four points with edges 01, 12, 03, 23 (coding nodes ε, 1, 01, 101).
pub fn p4() -> EnumStructure {
    graph(4, &[(0, 1), (1, 2), (0, 3), (2, 3)])
}

/// Four points with edges 01, 02, 13 (coding nodes ε, 1, 10, 010).
pub fn r4() -> EnumStructure {
    graph(4, &[(0, 1), (0, 2), (1, 3)])
}

/// All finite graphs.
pub fn graphs() -> ForbFamily {
    ForbFamily::new(Language::graphs(), Vec::new()).expect("valid")
}

/// All finite graphs with two vertex types.
pub fn graphs_two_unary() -> ForbFamily {
    ForbFamily::new(two_unary_language(), Vec::new()).expect("valid")
}

/// Triangle-free graphs.
pub fn triangle_free() -> ForbFamily {
    ForbFamily::new(Language::graphs(), vec![k3()]).expect("valid")
}

/// Directed graphs without a directed 3-cycle.
pub fn no_directed_triangle() -> ForbFamily {
    let lang = directed_language();
    let cyc = EnumStructure::from_upper(&lang, &[0, 0, 0], &[(0, 1, 1), (1, 2, 1), (0, 2, 2)]).expect("valid");
    ForbFamily::new(lang, vec![cyc]).expect("valid")
}
