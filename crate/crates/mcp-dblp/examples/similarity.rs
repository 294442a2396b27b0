//! The similarity measure behind every fuzzy operation: longest common
//! blocks, counted recursively, normalized to 2M / (|a| + |b|). Case and
//! punctuation are ignored. No server needed.
//!
//! ```text
//! cargo run --example similarity
//! ```

use mcp_dblp::similarity;

fn main() {
    let pairs = [
        ("Attention Is All You Need", "Attention is All you Need."),
        ("Attention Is All You Need", "Attention May Be All You Need"),
        ("Don Knuth", "Donald E. Knuth"),
        ("Don Knuth", "Donald Kossmann"),
        ("gestalt pattern matching", "pattern matching, gestalt"),
        ("abcd", "bcde"),
    ];
    for (a, b) in pairs {
        println!("{:.3}  {a:?} vs {b:?}", similarity(a, b).value());
    }
}
