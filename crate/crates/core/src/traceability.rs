//! Claim-to-test table. `docs/traceability.md` is generated from [`ROWS`]
//! and a unit test fails when the two drift apart.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceabilityRow {
    pub claim: &'static str,
    pub statement: &'static str,
    pub operation: &'static str,
    /// `module::tests::name`.
    pub test: &'static str,
}

const fn row(
    claim: &'static str,
    statement: &'static str,
    operation: &'static str,
    test: &'static str,
) -> TraceabilityRow {
    TraceabilityRow {
        claim,
        statement,
        operation,
        test,
    }
}

pub const ROWS: &[TraceabilityRow] = &[
    row(
        "product-law",
        "`(a1,b1)(a2,b2) = (a1 + phi11^b1 a2, b1 + b2)` is associative",
        "group::GroupSpec::mul",
        "group::tests::associativity_exhaustive_small",
    ),
    row(
        "commutation",
        "`y x y^-1 = x^phi11`, `x^N = y^p = e`",
        "group::GroupSpec::mul",
        "group::tests::commutation_relation",
    ),
    row(
        "twist-order",
        "a twist exists iff `phi11` is a unit with `phi11^p = 1 (mod N)`",
        "group::validate_spec",
        "group::tests::validate_spec_examples",
    ),
    row(
        "twist-off-p-part",
        "`phi11 = 1` modulo every prime power of `N` other than the `p`-part",
        "decomposition::decompose",
        "decomposition::tests::twist_is_trivial_off_the_p_part",
    ),
    row(
        "component-automorphisms",
        "order-`p` automorphisms of `Z_N` act componentwise on the CRT factors",
        "decomposition::decompose",
        "decomposition::tests::automorphisms_preserve_components",
    ),
    row(
        "crt-isomorphism",
        "`Z_N x| Z_p = Z_M0 x (Z_p^r x| Z_p)` via `a -> (a mod M0, a mod p^r)`",
        "decomposition::DecomposedSpec::map_element",
        "decomposition::tests::map_element_is_an_isomorphism",
    ),
    row(
        "product-splitting",
        "every subgroup of a coprime product is the product of its projections",
        "decomposition::DecomposedSpec::split_subgroup",
        "decomposition::tests::every_subgroup_splits",
    ),
    row(
        "order-p-units",
        "units of order `p` modulo `2 p^r` are `2 j p^(r-1) + 1`, `1 <= j < p`",
        "modmath::order_p_elements",
        "modmath::tests::order_p_elements_complete",
    ),
    row(
        "twist-isomorphism",
        "`Psi_i: x^a y^b -> x^a y^(b/i)` carries the canonical twist to its `i`-th power",
        "subgroups::isomorphism_psi",
        "subgroups::tests::psi_is_an_isomorphism",
    ),
    row(
        "power-formula",
        "`(x^a y^b)^k = x^(a k ((k-1) b p^(r-1) + 1)) y^(b k)`",
        "group::GroupSpec::pow_closed_form_2pr",
        "group::tests::closed_form_power_agrees_with_pow",
    ),
    row(
        "order-formula",
        "`ord(x^a y^b)` is `N p / gcd(a, N)` when `p^r | a`, `b != 0`, else `N / gcd(a, N)`",
        "group::GroupSpec::element_order",
        "group::tests::element_order_paths_agree_on_small_groups",
    ),
    row(
        "cyclic-elements",
        "explicit element lists of `<x^a y^b>`",
        "subgroups::cyclic_elements",
        "subgroups::tests::cyclic_elements_equal_closure_exhaustive",
    ),
    row(
        "classification",
        "every subgroup is `C(t,s)`, `T(t,s,h)` or `Y(t)`",
        "subgroups::enumerate_subgroups",
        "subgroups::tests::enumeration_matches_brute_force_lattice",
    ),
    row(
        "coset-subset",
        "`x^(h 2^t p^(s-1) b) y^b` lies in `T(t,s,h)` for every `b`",
        "subgroups::membership",
        "subgroups::tests::coset_subset_property",
    ),
    row(
        "hiding-condition",
        "`f(g1) = f(g2)` iff `g1 H = g2 H`",
        "oracle::make_oracle",
        "oracle::tests::label_count_is_the_index",
    ),
    row(
        "grid-injectivity",
        "for `H = C(t,s)` the oracle is injective on the `p x p` sampling grid",
        "oracle::make_oracle",
        "oracle::tests::cyclic_oracle_is_injective_on_the_grid",
    ),
    row(
        "fourier-transform",
        "`F_p|l> = p^(-1/2) sum_k e^(2 pi i k l / p)|k>`",
        "qsim::qft_p",
        "qsim::tests::qft_matches_the_defining_sum_on_each_register",
    ),
    row(
        "two-generator-amplitudes",
        "for `T(t,s,h)` the post-transform amplitude is `p^(-1/2) e^(2 pi i a0 c / p)` on `ch + d = 0`",
        "qsim::analysis_branches",
        "qsim::tests::branch_phases_and_norms",
    ),
    row(
        "cyclic-uniformity",
        "for `C(t,s)` the measured `(c, d)` is uniform on `Z_p x Z_p`",
        "qsim::post_collapse_distribution",
        "qsim::tests::cyclic_distribution_is_uniform",
    ),
    row(
        "h-extraction",
        "`h = -c^(p-2) d (mod p)` whenever `c != 0`",
        "qsim::RoundOutcome::from_measurement",
        "qsim::tests::h_tilde_formula",
    ),
    row(
        "round-survival",
        "for `T(t,s,h)` a round survives with probability `1 - 1/p` and then yields `h`",
        "qsim::run_round",
        "qsim::tests::survival_probability_is_exact",
    ),
    row(
        "abelian-subroutine",
        "Fourier sampling on `Z_M` recovers `H ∩ <x>`",
        "qsim::abelian_hsp_cyclic",
        "qsim::tests::abelian_recovers_every_divisor",
    ),
    row(
        "cyclic-error-bound",
        "the repetition rule misreports `C(t,s)` with probability at most `(2^k - 1) / p^(k-1)`",
        "experiments::exact_cyclic_decision",
        "experiments::tests::enumeration_matches_closed_form_and_bound",
    ),
    row(
        "total-success-bound",
        "success probability at least `1 - (2^k p - p + 1) / p^k`",
        "experiments::success_bound",
        "experiments::tests::bounds_match_rational_arithmetic",
    ),
    row(
        "end-to-end",
        "the hidden subgroup of `Z_N x| Z_p` is recovered when `p` divides no `q - 1`, `q | N`",
        "qsim::solve_general",
        "qsim::tests::solve_general_on_decomposed_groups",
    ),
];

/// The markdown table shipped as `docs/traceability.md`.
pub fn generate_traceability() -> String {
    let mut out = String::from(
        "# Traceability\n\n\
         Generated by `cargo run --example traceability`. Each claim names the\n\
         operation implementing it and the unit test checking it.\n\n\
         | claim | statement | operation | test |\n\
         |---|---|---|---|\n",
    );
    for r in ROWS {
        out.push_str(&format!(
            "| {} | {} | `{}` | `{}` |\n",
            r.claim, r.statement, r.operation, r.test
        ));
    }
    out
}
