use alloc::string::String;
use alloc::vec::Vec;

use super::DirectedGraph;
use crate::{Error, Result};

/// Upper bound on declared best friends per profile.
pub const MAX_FRIENDS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrawlConfig {
    pub seeds: Vec<String>,
    pub depth: usize,
    pub max_out_degree: usize,
}

/// Breadth-first snowball sample along out-links.
///
/// Level 0 is the seed set; each further level adds the first
/// `max_out_degree` successors of every node in the previous level. The
/// sample keeps every edge of `g` between visited nodes, which is exactly
/// what a crawler sees from the visited profiles' out-link lists.
pub fn bfs_crawl(g: &DirectedGraph, cfg: &CrawlConfig) -> Result<DirectedGraph> {
    if cfg.max_out_degree == 0 || cfg.max_out_degree > MAX_FRIENDS {
        return Err(Error::InvalidConfig(alloc::format!(
            "max_out_degree must be in 1..={MAX_FRIENDS}, got {}",
            cfg.max_out_degree
        )));
    }
    let mut visited = alloc::vec![false; g.node_count()];
    let mut frontier = Vec::new();
    for s in &cfg.seeds {
        let ix = g.ix(s)?;
        if !visited[ix] {
            visited[ix] = true;
            frontier.push(ix);
        }
    }
    for _ in 0..cfg.depth {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.successors(u).iter().take(cfg.max_out_degree) {
                if !visited[v] {
                    visited[v] = true;
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(g.induced_subgraph(&visited))
}
