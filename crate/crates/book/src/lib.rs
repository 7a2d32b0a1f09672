//! Guide snippets, tested as doc-tests. Each chapter of `book/src` is
//! attached to one item so `cargo test -p despot-book` compiles and runs
//! every Rust block in it.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

chapter!(introduction, "introduction.md");
chapter!(models, "models.md");
chapter!(beliefs, "beliefs.md");
chapter!(trees, "trees.md");
chapter!(search, "search.md");
chapter!(exact, "exact.md");
chapter!(bounds, "bounds.md");
chapter!(harness, "harness.md");
chapter!(theory, "theory.md");
