//! Random planar 3-SAT instances for oracle tests.

use rand::seq::SliceRandom;
use rand::Rng;

use super::embed::{embed_line, validate_embedding, LineClause, Side};
use super::{Lit, Planar3SatInstance};

/// Up to `nclauses` clauses of one to three literals over `nvars`
/// variables, each drawn until the line embedding stays valid.
pub fn random_planar_instance<R: Rng>(
    rng: &mut R,
    nvars: usize,
    nclauses: usize,
) -> Planar3SatInstance {
    let mut order: Vec<usize> = (0..nvars).collect();
    order.shuffle(rng);
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut lcs: Vec<LineClause> = Vec::new();
    for _ in 0..nclauses {
        for _attempt in 0..50 {
            let k = [1, 2, 3, 3, 3][rng.gen_range(0..5)].min(nvars);
            let vars: Vec<usize> = rand::seq::index::sample(rng, nvars, k).into_vec();
            let side = if rng.gen_bool(0.5) {
                Side::Above
            } else {
                Side::Below
            };
            lcs.push(LineClause {
                vars: vars.clone(),
                side,
            });
            if validate_embedding(&embed_line(nvars, &order, &lcs)).is_valid() {
                clauses.push(
                    vars.into_iter()
                        .map(|var| Lit {
                            var,
                            neg: rng.gen_bool(0.5),
                        })
                        .collect(),
                );
                break;
            }
            lcs.pop();
        }
    }
    Planar3SatInstance {
        vars: (1..=nvars).map(|i| format!("x{i}")).collect(),
        clauses,
        embedding: embed_line(nvars, &order, &lcs),
    }
}
