#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "comparison.hpp"

namespace mlg
{

struct HarnessSpec {
    std::string name;
    CoverDatum cover;
    Int q = 3;
    std::optional<Int> k;
    std::uint64_t seed = 0;
    std::size_t base_points = 2;
};

/**
 * A D-model built so that every fiber is nonempty: c_i = (1 - q^i) f for a
 * random character f, and s_1 = f * lambda * x^n with lambda Gamma-invariant
 * and x in Z-hat. Then gamma^{-1}s_1/s_1 = gamma^{-1}(x^n)/x^n is an n-th
 * power inside Z-hat.
 */
struct HarnessModel {
    std::string name;
    std::shared_ptr<const DModel> dm;
    std::vector<Splitting> base_points;
    TorusCharacter f;
    TorusCharacter lambda;
};

namespace detail
{
inline TorusCharacter random_z_hat(const DModel& dm, std::mt19937_64& rng)
{
    TorusCharacter x(dm.rank(), 0);
    std::uniform_int_distribution<Int> coeff(0, dm.fm.N - 1);
    for (const auto& gen : z_hat_generators(dm))
        x = reduced(added(x, scaled(gen, coeff(rng))), dm.fm.N);
    return x;
}
} // namespace detail

inline HarnessModel generate_harness_model(const HarnessSpec& spec)
{
    MetaplecticDualDatum dd = compute_dual_datum(spec.cover);
    FieldModel fm = build_field_model(spec.q, spec.cover.n, spec.k);
    const std::size_t r = dd.rank();
    const Int N = fm.N;
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<Int> any(0, N - 1);
    std::uniform_int_distribution<Int> unit(0, fm.q - 2);

    HarnessModel hm;
    hm.name = spec.name;
    for (std::size_t j = 0; j < r; ++j) {
        hm.f.push_back(any(rng));
        hm.lambda.push_back(checked_mul(unit(rng), fm.base_step()));
    }
    std::vector<TorusCharacter> c;
    for (Int i = 0; i < fm.k; ++i) {
        TorusCharacter row;
        Int factor = mod(1 - powmod(fm.q, i, N), N);
        for (std::size_t j = 0; j < r; ++j)
            row.push_back(mulmod(factor, hm.f[j], N));
        c.push_back(row);
    }
    TorusCharacter base = reduced(added(hm.f, hm.lambda), N);
    std::vector<EInput> e_inputs;
    for (std::size_t a = 0; a < dd.ysc_basis.size(); ++a) {
        std::size_t alpha = dd.cover.rd.simple[a];
        Int value = dot_mod(dd.ysc_basis[a], base, N);
        if (dd.r_alpha[alpha] == -1)
            value = mod(value - N / 2, N);
        e_inputs.push_back({dd.modified_coroots[alpha], value});
    }
    auto dm = std::make_shared<const DModel>(build_d_model(dd, fm, std::move(c), std::move(e_inputs)));
    hm.dm = dm;

    TorusCharacter x = detail::random_z_hat(*dm, rng);
    Splitting s1{reduced(added(base, scaled(x, fm.n)), N)};
    hm.base_points.push_back(s1);
    // Further base points: n-th power twists of s_1 first (these are
    // isomorphic to s_1), then twists by Galois-fixed points of Z-hat.
    for (int attempt = 0; attempt < 64 && hm.base_points.size() < spec.base_points; ++attempt) {
        TorusCharacter b = detail::random_z_hat(*dm, rng);
        Splitting s{reduced(added(s1.t, scaled(b, -fm.n)), N)};
        if (std::find(hm.base_points.begin(), hm.base_points.end(), s) == hm.base_points.end())
            hm.base_points.push_back(s);
    }
    for (int attempt = 0; attempt < 64 && hm.base_points.size() < spec.base_points; ++attempt) {
        TorusCharacter z = detail::random_z_hat(*dm, rng);
        if (fm.k > 1 && gamma_x_over_x(fm, {1}, z) != TorusCharacter(r, 0))
            continue;   // the twisted point would have empty fibers
        Splitting s = twist_splitting(*dm, z, s1);
        if (std::find(hm.base_points.begin(), hm.base_points.end(), s) == hm.base_points.end())
            hm.base_points.push_back(s);
    }
    return hm;
}

} // namespace mlg
