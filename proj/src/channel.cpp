#include "cvqkd/channel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <thread>

#include "cvqkd/csv.hpp"
#include "cvqkd/kernels.hpp"

namespace cvqkd {
namespace {

// One logical RNG stream per independent noise source of the session. The
// layout is part of the reproducibility contract: a given (seed, stream,
// element index) always yields the same draw, so chunk boundaries and thread
// scheduling cannot change a batch.
enum Stream : std::uint32_t {
  kStreamXA0 = 0,
  kStreamPA0,
  kStreamXB0,
  kStreamPB0,
  kStreamPirGate,
  kStreamPirX,
  kStreamPirP,
  kStreamZAcX,
  kStreamZAcP,
  kStreamZBcX,
  kStreamZBcP,
  kStreamVXC,
  kStreamVPC,
  kStreamVXD,
  kStreamVPD,
  kStreamEXC,
  kStreamEPC,
  kStreamEXD,
  kStreamEPD,
};

constexpr std::size_t kChunk = 16384;

struct SessionCoefs {
  double sigma_a, sigma_b;        // sqrt(V) modulation spreads
  double sqrt_ga, sqrt_gb;        // seeding amplitude gains
  double sqrt_t_ac, sqrt_t_bc;    // link amplitude transmittances
  double sigma_z_ac, sigma_z_bc;  // link noise spreads sqrt(T*eps+1)
  double u;                       // intercept-resend fraction on A-C
  double sqrt_eta, sqrt_one_minus_eta, sqrt_nu_el;
};

struct Scratch {
  std::vector<double> tmp, noise, gate, pa0, xb0, tax, tap, tbx, tbp;
  explicit Scratch(std::size_t m)
      : tmp(m), noise(m), gate(m), pa0(m), xb0(m), tax(m), tap(m), tbx(m), tbp(m) {}
};

void run_chunk(const SessionCoefs& c, std::uint64_t seed, std::size_t begin, std::size_t m,
               SampleBatch& batch, Scratch& s) {
  const auto& k = kernels::active_kernels();
  const std::uint64_t first = begin;
  const double root_half = std::sqrt(0.5);

  double* xa0 = batch.x_a0.data() + begin;
  double* pb0 = batch.p_b0.data() + begin;
  double* xc = batch.x_c.data() + begin;
  double* pc = batch.p_c.data() + begin;
  double* xd = batch.x_d.data() + begin;
  double* pd = batch.p_d.data() + begin;

  // Alice's draws; the batch keeps the un-seeded values.
  k.gaussian_fill(seed, kStreamXA0, first, m, s.tmp.data());
  k.scale(s.tmp.data(), c.sigma_a, xa0, m);
  k.gaussian_fill(seed, kStreamPA0, first, m, s.tmp.data());
  k.scale(s.tmp.data(), c.sigma_a, s.pa0.data(), m);

  // What actually leaves the lab is brightened by sqrt(g).
  k.scale(xa0, c.sqrt_ga, s.tax.data(), m);
  k.scale(s.pa0.data(), c.sqrt_ga, s.tap.data(), m);

  if (c.u > 0.0) {
    // Intercept-resend at the A-C channel input: one gate per state, noise of
    // variance 2*N0 on each quadrature of the re-prepared fraction.
    const double root_two = std::sqrt(2.0);
    k.uniform_fill(seed, kStreamPirGate, first, m, s.gate.data());
    k.gaussian_fill(seed, kStreamPirX, first, m, s.noise.data());
    k.add_if_below(s.tax.data(), s.gate.data(), c.u, root_two, s.noise.data(), m);
    k.gaussian_fill(seed, kStreamPirP, first, m, s.noise.data());
    k.add_if_below(s.tap.data(), s.gate.data(), c.u, root_two, s.noise.data(), m);
  }

  k.gaussian_fill(seed, kStreamZAcX, first, m, s.noise.data());
  k.lin2(s.tax.data(), s.noise.data(), c.sqrt_t_ac, c.sigma_z_ac, s.tax.data(), m);
  k.gaussian_fill(seed, kStreamZAcP, first, m, s.noise.data());
  k.lin2(s.tap.data(), s.noise.data(), c.sqrt_t_ac, c.sigma_z_ac, s.tap.data(), m);

  // Bob's side, same structure, no intercept-resend.
  k.gaussian_fill(seed, kStreamXB0, first, m, s.tmp.data());
  k.scale(s.tmp.data(), c.sigma_b, s.xb0.data(), m);
  k.gaussian_fill(seed, kStreamPB0, first, m, s.tmp.data());
  k.scale(s.tmp.data(), c.sigma_b, pb0, m);

  k.scale(s.xb0.data(), c.sqrt_gb, s.tbx.data(), m);
  k.scale(pb0, c.sqrt_gb, s.tbp.data(), m);

  k.gaussian_fill(seed, kStreamZBcX, first, m, s.noise.data());
  k.lin2(s.tbx.data(), s.noise.data(), c.sqrt_t_bc, c.sigma_z_bc, s.tbx.data(), m);
  k.gaussian_fill(seed, kStreamZBcP, first, m, s.noise.data());
  k.lin2(s.tbp.data(), s.noise.data(), c.sqrt_t_bc, c.sigma_z_bc, s.tbp.data(), m);

  // Relay beam splitter.
  k.lin2(s.tax.data(), s.tbx.data(), root_half, -root_half, xc, m);
  k.lin2(s.tap.data(), s.tbp.data(), root_half, -root_half, pc, m);
  k.lin2(s.tax.data(), s.tbx.data(), root_half, root_half, xd, m);
  k.lin2(s.tap.data(), s.tbp.data(), root_half, root_half, pd, m);

  // Detection. The electronic-noise stream is always consumed so the draw
  // layout does not depend on nu_el.
  const auto detect = [&](double* out, Stream vac, Stream el) {
    k.gaussian_fill(seed, vac, first, m, s.tmp.data());
    k.gaussian_fill(seed, el, first, m, s.noise.data());
    k.lin3(out, s.tmp.data(), s.noise.data(), c.sqrt_eta, c.sqrt_one_minus_eta, c.sqrt_nu_el,
           out, m);
  };
  detect(xc, kStreamVXC, kStreamEXC);
  detect(pc, kStreamVPC, kStreamEPC);
  detect(xd, kStreamVXD, kStreamEXD);
  detect(pd, kStreamVPD, kStreamEPD);
}

}  // namespace

QuadraturePair propagate_deterministic(const QuadraturePair& in, const ChannelTruth& ch,
                                       const QuadraturePair& z) {
  ch.validate();
  const double t = std::sqrt(ch.t);
  return {t * in.x + z.x, t * in.p + z.p};
}

QuadraturePair sample_linear_channel(const QuadraturePair& in, const ChannelTruth& ch,
                                     PhiloxRng& rng) {
  ch.validate();
  const double sigma = std::sqrt(ch.noise_variance());
  const QuadraturePair z{sigma * rng.gaussian(), sigma * rng.gaussian()};
  return propagate_deterministic(in, ch, z);
}

QuadraturePair apply_intercept_resend(const QuadraturePair& q, double u, PhiloxRng& rng) {
  if (!(u >= 0.0) || u > 1.0) throw std::invalid_argument("intercept fraction u must be in [0,1]");
  if (u == 0.0) return q;
  if (rng.uniform() >= u) return q;
  const double sigma = std::sqrt(2.0);
  return {q.x + sigma * rng.gaussian(), q.p + sigma * rng.gaussian()};
}

SampleBatch simulate_mdi_session(const MdiParams& params, const AttackConfig& attack,
                                 std::size_t n, std::uint64_t seed, unsigned threads) {
  params.validate();
  attack.validate();
  if (n < 2) throw std::invalid_argument("simulate_mdi_session needs n >= 2");

  const double t_ac = transmittance_from_distance(params.l_ac_km, params.loss_db_per_km);
  const double t_bc = transmittance_from_distance(params.l_bc_km, params.loss_db_per_km);
  SessionCoefs c{};
  c.sigma_a = std::sqrt(params.v_a);
  c.sigma_b = std::sqrt(params.v_b);
  c.sqrt_ga = std::sqrt(attack.g_alice);
  c.sqrt_gb = std::sqrt(attack.g_bob);
  c.sqrt_t_ac = std::sqrt(t_ac);
  c.sqrt_t_bc = std::sqrt(t_bc);
  c.sigma_z_ac = std::sqrt(t_ac * params.eps_ac + 1.0);
  c.sigma_z_bc = std::sqrt(t_bc * params.eps_bc + 1.0);
  c.u = attack.u;
  c.sqrt_eta = std::sqrt(params.charlie_det.eta);
  c.sqrt_one_minus_eta = std::sqrt(1.0 - params.charlie_det.eta);
  c.sqrt_nu_el = std::sqrt(params.charlie_det.nu_el);

  SampleBatch batch;
  batch.rng_seed = seed;
  batch.x_a0.resize(n);
  batch.p_b0.resize(n);
  batch.x_c.resize(n);
  batch.p_c.resize(n);
  batch.x_d.resize(n);
  batch.p_d.resize(n);

  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  unsigned nthreads = threads != 0 ? threads : std::thread::hardware_concurrency();
  nthreads = std::max(1u, std::min<unsigned>(nthreads, static_cast<unsigned>(nchunks)));

  if (nthreads == 1) {
    Scratch s(kChunk);
    for (std::size_t chunk = 0; chunk < nchunks; ++chunk) {
      const std::size_t begin = chunk * kChunk;
      run_chunk(c, seed, begin, std::min(kChunk, n - begin), batch, s);
    }
    return batch;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    Scratch s(kChunk);
    for (std::size_t chunk = next.fetch_add(1); chunk < nchunks; chunk = next.fetch_add(1)) {
      const std::size_t begin = chunk * kChunk;
      run_chunk(c, seed, begin, std::min(kChunk, n - begin), batch, s);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return batch;
}

void write_batch_csv(std::ostream& out, const SampleBatch& batch) {
  out << "idx,x_A0,p_B0,x_C,p_C,x_D,p_D\n";
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out << i << ',' << csv::format_full(batch.x_a0[i]) << ',' << csv::format_full(batch.p_b0[i])
        << ',' << csv::format_full(batch.x_c[i]) << ',' << csv::format_full(batch.p_c[i]) << ','
        << csv::format_full(batch.x_d[i]) << ',' << csv::format_full(batch.p_d[i]) << '\n';
  }
}

SampleBatch read_batch_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("sample CSV: empty input");
  csv::strip_bom(line);
  {
    auto header = csv::split_line(line);
    const std::vector<std::string> expected{"idx", "x_A0", "p_B0", "x_C", "p_C", "x_D", "p_D"};
    if (std::vector<std::string>(header.begin(), header.end()) != expected)
      throw std::invalid_argument("sample CSV: unexpected header '" + line + "'");
  }
  SampleBatch batch;
  std::size_t expect_idx = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != 7)
      throw std::invalid_argument("sample CSV: row with " + std::to_string(fields.size()) +
                                  " fields");
    const double idx = csv::parse_double(fields[0], "idx");
    if (idx != static_cast<double>(expect_idx))
      throw std::invalid_argument("sample CSV: non-sequential idx at row " +
                                  std::to_string(expect_idx));
    ++expect_idx;
    batch.x_a0.push_back(csv::parse_double(fields[1], "x_A0"));
    batch.p_b0.push_back(csv::parse_double(fields[2], "p_B0"));
    batch.x_c.push_back(csv::parse_double(fields[3], "x_C"));
    batch.p_c.push_back(csv::parse_double(fields[4], "p_C"));
    batch.x_d.push_back(csv::parse_double(fields[5], "x_D"));
    batch.p_d.push_back(csv::parse_double(fields[6], "p_D"));
  }
  if (batch.size() < 2) throw std::invalid_argument("sample CSV: needs at least 2 rows");
  return batch;
}

}  // namespace cvqkd
