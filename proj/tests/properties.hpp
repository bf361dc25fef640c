#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cvloss::testing {

/// Outcome of one randomized property over many generated instances.
struct PropertyResult {
    std::string name;
    int instances = 0;
    int failures = 0;
    double worst = 0.0;  ///< largest deviation seen, or the least favourable margin
    std::string first_failure;

    bool passed() const { return instances > 0 && failures == 0; }
};

inline constexpr int k_property_instances = 100;

PropertyResult semigroup_law(std::uint64_t seed, int n = k_property_instances);
PropertyResult vacuum_fixed_point(std::uint64_t seed, int n = k_property_instances);
PropertyResult photon_number_monotone(std::uint64_t seed, int n = k_property_instances);
PropertyResult vacuum_asymptotics(std::uint64_t seed, int n = k_property_instances);
PropertyResult decay_inverse(std::uint64_t seed, int n = k_property_instances);
PropertyResult equal_rates_keep_mode(std::uint64_t seed, int n = k_property_instances);
PropertyResult projector_properties(std::uint64_t seed, int n = k_property_instances);
PropertyResult physicality_basis_independent(std::uint64_t seed, int n = k_property_instances);
PropertyResult commutator_antisymmetric(std::uint64_t seed, int n = k_property_instances);
PropertyResult wigner_normalization(std::uint64_t seed, int n = k_property_instances);
PropertyResult witness_forms_agree(std::uint64_t seed, int n = k_property_instances);
PropertyResult a_matrix_rank_psd(std::uint64_t seed, int n = k_property_instances);
PropertyResult marginal_matches_quadrature(std::uint64_t seed, int n = k_property_instances);
PropertyResult gaussian_kurtosis_zero(std::uint64_t seed, int n = k_property_instances);
PropertyResult subtraction_vertex_kurtosis_negative(std::uint64_t seed, int n = k_property_instances);
PropertyResult grid_negativity_matches_witness(std::uint64_t seed, int n = k_property_instances);
PropertyResult commutation_dichotomy(std::uint64_t seed, int n = k_property_instances);
PropertyResult no_signalling_subtract_first(std::uint64_t seed, int n = k_property_instances);
PropertyResult graph_states_pure(std::uint64_t seed, int n = k_property_instances);

/// Every property above with its default instance count.
std::vector<PropertyResult> all_properties(std::uint64_t seed);

}  // namespace cvloss::testing
