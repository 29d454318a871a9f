//! Catalog of the named link families: canonical exemplars, random samplers
//! for property tests, and construction from `(tag, params)` pairs as they
//! appear in config files and sweep grids.

use std::collections::BTreeMap;

use rand::Rng;

use crate::generating::{GeneratingFunction, HKind};
use crate::linkfn::LinkFamily;

/// Catalog tags, in presentation order. `identity` is deliberately absent:
/// it is a Euclidean pseudo-link, accepted by [`from_tag_params`] but not a
/// deformed logarithm.
pub const TAGS: [&str; 12] = [
    "natural",
    "tsallis",
    "kaniadakis",
    "ext_kaniadakis",
    "kls",
    "three_param",
    "htg",
    "htg_tanh",
    "htg_atan",
    "ks",
    "euler",
    "tempesta",
];

/// The generating function used by the default `tempesta` exemplar:
/// `phi(x) = x^0.8 - x^0.3 + x`, monotone and concave on the positive axis
/// with `phi(0) = 0` and bounded `phi'`.
pub fn default_phi() -> GeneratingFunction {
    GeneratingFunction::power_sum(0.8, 0.3, 1.0, 1.0, 1.0)
}

/// Canonical exemplar for a tag. Panics on unknown tags; use
/// [`from_tag_params`] for fallible construction from user input.
pub fn default_for(tag: &str) -> LinkFamily {
    match tag {
        "natural" => LinkFamily::Natural,
        "identity" => LinkFamily::Identity,
        "tsallis" => LinkFamily::Tsallis { q: 0.7 },
        "kaniadakis" => LinkFamily::Kaniadakis { kappa: 0.3 },
        "ext_kaniadakis" => LinkFamily::ExtKaniadakis {
            alpha: 2.0,
            sigma: 0.4,
        },
        "kls" => LinkFamily::Kls { kappa: 0.4, r: 0.15 },
        "three_param" => LinkFamily::ThreeParam {
            kappa: 0.4,
            r: 0.15,
            lambda: 2.0,
        },
        "htg" => LinkFamily::Htg { a: 0.3, b: -0.2 },
        "htg_tanh" => LinkFamily::HtgGeneral {
            a: 0.3,
            b: -0.2,
            h: HKind::Tanh,
        },
        "htg_atan" => LinkFamily::HtgGeneral {
            a: 0.3,
            b: -0.2,
            h: HKind::AtanScaled,
        },
        "ks" => LinkFamily::Ks {
            kappa: 0.3,
            lambda: 2.0,
        },
        "euler" => LinkFamily::Euler { a: 0.5, b: -0.5 },
        "tempesta" => LinkFamily::Tempesta {
            phi: default_phi(),
            alpha: 0.5,
            sigma: -0.5,
        },
        other => panic!("unknown family tag {other:?}"),
    }
}

/// A second `tempesta` exemplar with linear generating function
/// `phi(x) = 2x - 1`; by construction it coincides with the Tsallis
/// logarithm at `q = 1 + sigma`, which makes it useful as a cross-check.
pub fn tempesta_linear_exemplar() -> LinkFamily {
    LinkFamily::Tempesta {
        phi: GeneratingFunction::linear(2.0, 1.0),
        alpha: 0.25,
        sigma: -0.3,
    }
}

/// One valid exemplar per catalog tag, plus the linear-`phi` `tempesta`
/// variant. Every entry passes [`LinkFamily::validate_params`].
pub fn defaults() -> Vec<LinkFamily> {
    let mut out: Vec<LinkFamily> = TAGS.iter().map(|t| default_for(t)).collect();
    out.push(tempesta_linear_exemplar());
    out
}

/// Draw random valid parameters for a tag, for property tests. Sampling
/// ranges sit strictly inside the valid regions so that finite-difference
/// and round-trip checks are well conditioned; anything that still fails
/// validation (possible for `htg_atan`, whose concavity region is slightly
/// smaller than `htg`'s) is resampled, falling back to the exemplar.
pub fn sample<R: Rng + ?Sized>(tag: &str, rng: &mut R) -> LinkFamily {
    for _ in 0..64 {
        let cand = sample_once(tag, rng);
        if cand.validate_params().is_ok() {
            return cand;
        }
    }
    default_for(tag)
}

fn sample_once<R: Rng + ?Sized>(tag: &str, rng: &mut R) -> LinkFamily {
    match tag {
        "natural" => LinkFamily::Natural,
        "identity" => LinkFamily::Identity,
        "tsallis" => LinkFamily::Tsallis {
            q: rng.gen_range(0.25..1.9),
        },
        "kaniadakis" => LinkFamily::Kaniadakis {
            kappa: rng.gen_range(-0.9..0.9),
        },
        "ext_kaniadakis" => LinkFamily::ExtKaniadakis {
            alpha: rng.gen_range(0.0..3.0),
            sigma: rng.gen_range(-0.95..0.95),
        },
        "kls" => {
            let kappa: f64 = rng.gen_range(0.1..0.85);
            let m = 0.9 * kappa.min(0.95 - kappa);
            LinkFamily::Kls {
                kappa,
                r: rng.gen_range(-m..m),
            }
        }
        "three_param" => {
            let kappa: f64 = rng.gen_range(0.1..0.85);
            let m = 0.9 * kappa.min(0.95 - kappa);
            LinkFamily::ThreeParam {
                kappa,
                r: rng.gen_range(-m..m),
                lambda: rng.gen_range(0.5..3.0),
            }
        }
        "htg" | "htg_tanh" | "htg_atan" => {
            let a = rng.gen_range(0.02..0.6);
            let b = -rng.gen_range(0.02..(0.9 - a));
            match tag {
                "htg" => LinkFamily::Htg { a, b },
                "htg_tanh" => LinkFamily::HtgGeneral {
                    a,
                    b,
                    h: HKind::Tanh,
                },
                _ => LinkFamily::HtgGeneral {
                    a,
                    b,
                    h: HKind::AtanScaled,
                },
            }
        }
        "ks" => LinkFamily::Ks {
            kappa: rng.gen_range(-0.9..0.9),
            lambda: rng.gen_range(0.3..3.0),
        },
        "euler" => LinkFamily::Euler {
            a: rng.gen_range(0.05..0.95),
            b: -rng.gen_range(0.05..0.95),
        },
        "tempesta" => {
            let mag = rng.gen_range(0.05..0.75);
            let sigma = if rng.gen_bool(0.5) { mag } else { -mag };
            LinkFamily::Tempesta {
                phi: GeneratingFunction::linear(2.0, 1.0),
                alpha: rng.gen_range(0.05..0.45),
                sigma,
            }
        }
        other => panic!("unknown family tag {other:?}"),
    }
}

/// Build a family from a tag and named parameters, checking that exactly
/// the expected parameter names are present and that the resulting family
/// validates. Unknown tags, unknown/missing parameter names, and invalid
/// values all produce a message naming the offending item.
///
/// The `tempesta` tag takes `alpha` and `sigma`, and optionally `phi_a` and
/// `phi_c` (together) to replace the default generating function by the
/// linear `phi(x) = phi_a * x - phi_c`.
pub fn from_tag_params(
    tag: &str,
    params: &BTreeMap<String, f64>,
) -> Result<LinkFamily, String> {
    let mut remaining = params.clone();
    let mut take = |name: &str| -> Result<f64, String> {
        remaining
            .remove(name)
            .ok_or_else(|| format!("family {tag:?} requires parameter {name:?}"))
    };
    let fam = match tag {
        "natural" => LinkFamily::Natural,
        "identity" => LinkFamily::Identity,
        "tsallis" => LinkFamily::Tsallis { q: take("q")? },
        "kaniadakis" => LinkFamily::Kaniadakis {
            kappa: take("kappa")?,
        },
        "ext_kaniadakis" => LinkFamily::ExtKaniadakis {
            alpha: take("alpha")?,
            sigma: take("sigma")?,
        },
        "kls" => LinkFamily::Kls {
            kappa: take("kappa")?,
            r: take("r")?,
        },
        "three_param" => LinkFamily::ThreeParam {
            kappa: take("kappa")?,
            r: take("r")?,
            lambda: take("lambda")?,
        },
        "htg" => LinkFamily::Htg {
            a: take("a")?,
            b: take("b")?,
        },
        "htg_tanh" => LinkFamily::HtgGeneral {
            a: take("a")?,
            b: take("b")?,
            h: HKind::Tanh,
        },
        "htg_atan" => LinkFamily::HtgGeneral {
            a: take("a")?,
            b: take("b")?,
            h: HKind::AtanScaled,
        },
        "ks" => LinkFamily::Ks {
            kappa: take("kappa")?,
            lambda: take("lambda")?,
        },
        "euler" => LinkFamily::Euler {
            a: take("a")?,
            b: take("b")?,
        },
        "tempesta" => {
            let alpha = take("alpha")?;
            let sigma = take("sigma")?;
            let phi = match (remaining.remove("phi_a"), remaining.remove("phi_c")) {
                (Some(a), Some(c)) => GeneratingFunction::linear(a, c),
                (None, None) => default_phi(),
                _ => {
                    return Err(
                        "tempesta: phi_a and phi_c must be given together (or neither)".into(),
                    )
                }
            };
            LinkFamily::Tempesta { phi, alpha, sigma }
        }
        other => {
            return Err(format!(
                "unknown family tag {other:?} (expected one of: {})",
                TAGS.join(", ")
            ))
        }
    };
    if let Some(name) = remaining.keys().next() {
        return Err(format!("family {tag:?} has no parameter {name:?}"));
    }
    fam.validate_params()
        .map_err(|v| format!("invalid parameters for {tag:?}: {}", v.join("; ")))?;
    Ok(fam)
}

/// Metadata row for the `families` listing.
#[derive(Debug, Clone)]
pub struct FamilyMeta {
    pub tag: &'static str,
    /// Parameter names with their admissible ranges.
    pub params: &'static str,
    /// Whether the deformed exponential has a closed form (`yes`, `no`, or a
    /// qualified answer).
    pub closed_exp: &'static str,
    /// The catalog exemplar, written out with its parameters.
    pub exemplar: String,
}

/// Per-family metadata for the `families` listing, in [`TAGS`] order.
pub fn metadata() -> Vec<FamilyMeta> {
    TAGS.iter()
        .map(|&tag| {
            let (params, closed_exp) = match tag {
                "natural" => ("(none)", "yes"),
                "tsallis" => ("q > 0", "yes"),
                "kaniadakis" => ("kappa in [-1, 1]", "yes"),
                "ext_kaniadakis" => ("alpha >= 0, sigma in [-1, 1]", "no"),
                "kls" => ("kappa in [-1, 1], -|kappa| <= r <= |kappa|", "r = 0 only"),
                "three_param" => (
                    "kappa in [-1, 1], -|kappa| < r < |kappa|, lambda > 0",
                    "no",
                ),
                "htg" => ("a*b <= 0, max(a,b) - min(a,b) <= 1", "yes"),
                "htg_tanh" => ("a*b <= 0, max(a,b) - min(a,b) <= 1", "no"),
                "htg_atan" => (
                    "a*b <= 0, max(a,b) - min(a,b) <= 1, grid concavity check",
                    "no",
                ),
                "ks" => ("kappa in [-1, 1], lambda > 0", "yes"),
                "euler" => ("a*b <= 0, max(a,b) <= 1, a != b unless both 0", "no"),
                "tempesta" => (
                    "alpha, sigma with grid positivity check (phi_a, phi_c optional)",
                    "no",
                ),
                _ => unreachable!(),
            };
            FamilyMeta {
                tag,
                params,
                closed_exp,
                exemplar: default_for(tag).describe(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_defaults_validate() {
        for f in defaults() {
            assert!(
                f.validate_params().is_ok(),
                "{} failed validation: {:?}",
                f.describe(),
                f.validate_params()
            );
        }
    }

    #[test]
    fn samples_validate_for_every_tag() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for tag in TAGS {
            for _ in 0..25 {
                let f = sample(tag, &mut rng);
                assert!(
                    f.validate_params().is_ok(),
                    "sampled {} failed validation",
                    f.describe()
                );
                assert_eq!(f.tag(), tag);
            }
        }
    }

    #[test]
    fn from_tag_params_round_trip() {
        let mut p = BTreeMap::new();
        p.insert("q".to_string(), 0.7);
        let f = from_tag_params("tsallis", &p).unwrap();
        assert_eq!(f.describe(), "tsallis(q=0.7)");

        // missing parameter
        assert!(from_tag_params("tsallis", &BTreeMap::new())
            .unwrap_err()
            .contains("\"q\""));

        // unknown parameter
        let mut p = BTreeMap::new();
        p.insert("q".to_string(), 0.7);
        p.insert("zeta".to_string(), 1.0);
        assert!(from_tag_params("tsallis", &p).unwrap_err().contains("zeta"));

        // unknown tag
        assert!(from_tag_params("renyi", &BTreeMap::new())
            .unwrap_err()
            .contains("renyi"));

        // invalid value propagates the constraint text
        let mut p = BTreeMap::new();
        p.insert("q".to_string(), -1.0);
        let err = from_tag_params("tsallis", &p).unwrap_err();
        assert!(err.contains("q must be > 0"), "{err}");
    }

    #[test]
    fn tempesta_accepts_optional_linear_phi() {
        let mut p = BTreeMap::new();
        p.insert("alpha".to_string(), 0.25);
        p.insert("sigma".to_string(), -0.3);
        let f = from_tag_params("tempesta", &p).unwrap();
        assert!(f.describe().contains("tempesta"));

        p.insert("phi_a".to_string(), 2.0);
        p.insert("phi_c".to_string(), 1.0);
        let g = from_tag_params("tempesta", &p).unwrap();
        // the linear-phi variant coincides with tsallis at q = 1 + sigma
        let t = LinkFamily::Tsallis { q: 0.7 };
        for x in [0.2, 0.9, 3.0] {
            assert!(
                (g.log_eval(x).unwrap() - t.log_eval(x).unwrap()).abs() < 1e-12,
                "x = {x}"
            );
        }

        p.remove("phi_c");
        assert!(from_tag_params("tempesta", &p)
            .unwrap_err()
            .contains("together"));
    }

    #[test]
    fn metadata_covers_every_tag() {
        let meta = metadata();
        assert_eq!(meta.len(), TAGS.len());
        for (m, tag) in meta.iter().zip(TAGS) {
            assert_eq!(m.tag, tag);
            assert!(!m.exemplar.is_empty());
        }
    }
}
