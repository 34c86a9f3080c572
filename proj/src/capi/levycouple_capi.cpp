#include "levycouple/levycouple.h"

#include <cstring>
#include <string>
#include <vector>

#include "config.hpp"
#include "coupling.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "levy_models.hpp"
#include "metrics.hpp"
#include "model_syntax.hpp"
#include "parallel.hpp"

using namespace levycouple;

struct lvc_model {
  LevyModel model;
};
struct lvc_rng {
  RngStream rng;
};
struct lvc_cdf {
  CdfPtr cdf;
};
struct lvc_coupled {
  CoupledPaths paths;
};
struct lvc_config {
  ExperimentConfig cfg;
};

namespace {

thread_local std::string last_error;

template <class F>
lvc_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return LVC_OK;
  } catch (const InvalidArgument& e) {
    last_error = e.what();
    return LVC_INVALID_ARGUMENT;
  } catch (const ConfigError& e) {
    last_error = e.what();
    return LVC_CONFIG;
  } catch (const NumericalGuard& e) {
    last_error = e.what();
    return LVC_NUMERICAL_GUARD;
  } catch (const IoError& e) {
    last_error = e.what();
    return LVC_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LVC_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return LVC_INTERNAL;
  }
}

void not_null(const void* p, const char* what) {
  if (!p) throw InvalidArgument(std::string(what) + " must not be NULL");
}

void copy_out(const std::string& s, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf && cap > 0) {
    const std::size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
}

std::vector<std::size_t> level_sizes(const std::size_t* ks, std::size_t levels) {
  not_null(ks, "ks");
  if (levels == 0) throw InvalidArgument("need at least one level");
  return {ks, ks + levels};
}

}  // namespace

extern "C" {

const char* lvc_last_error(void) { return last_error.c_str(); }
const char* lvc_version(void) { return "0.1.0"; }

lvc_status lvc_set_threads(unsigned n) {
  return guarded([&] { set_thread_count(n); });
}

lvc_status lvc_model_parse(const char* text, lvc_model** out) {
  return guarded([&] {
    not_null(text, "text");
    not_null(out, "out");
    *out = nullptr;
    try {
      *out = new lvc_model{LevyModel(parse_model(text))};
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  });
}

void lvc_model_free(lvc_model* m) { delete m; }

lvc_status lvc_model_describe(const lvc_model* m, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    not_null(m, "model");
    copy_out(format_model(m->model.spec()), buf, cap, needed);
  });
}

lvc_status lvc_model_moments(const lvc_model* m, double* mu4, double* sigma2, double* jump_rate) {
  return guarded([&] {
    not_null(m, "model");
    const ModelMoments& mm = m->model.moments();
    if (mu4) *mu4 = mm.mu4;
    if (sigma2) *sigma2 = mm.sigma2;
    if (jump_rate) *jump_rate = mm.jump_rate;
  });
}

lvc_status lvc_model_tail(const lvc_model* m, double x, double* out) {
  return guarded([&] {
    not_null(m, "model");
    not_null(out, "out");
    *out = m->model.moments().tail(x);
  });
}

lvc_status lvc_rng_create(uint64_t seed, lvc_rng** out) {
  return guarded([&] {
    not_null(out, "out");
    *out = new lvc_rng{RngStream(seed)};
  });
}

lvc_status lvc_rng_split(const lvc_rng* parent, uint64_t child_id, lvc_rng** out) {
  return guarded([&] {
    not_null(parent, "rng");
    not_null(out, "out");
    *out = new lvc_rng{parent->rng.split(child_id)};
  });
}

void lvc_rng_free(lvc_rng* r) { delete r; }

lvc_status lvc_rng_uniform(lvc_rng* r, double* out) {
  return guarded([&] {
    not_null(r, "rng");
    not_null(out, "out");
    *out = r->rng.uniform();
  });
}

lvc_status lvc_sample_path(const lvc_model* m, int q, lvc_rng* r, double* values, size_t len) {
  return guarded([&] {
    not_null(m, "model");
    not_null(r, "rng");
    not_null(values, "values");
    const std::size_t cells = dyadic_cells(q);
    if (len != cells + 1) throw InvalidArgument("values length must be 2^q + 1");
    const FinePath p = sample_fine_path(m->model, q, r->rng);
    std::copy(p.values.begin(), p.values.end(), values);
  });
}

lvc_status lvc_sample_endpoint(const lvc_model* m, lvc_rng* r, double* out) {
  return guarded([&] {
    not_null(m, "model");
    not_null(r, "rng");
    not_null(out, "out");
    *out = sample_endpoint(m->model, r->rng);
  });
}

lvc_status lvc_increments_on_grid(const double* path, size_t len, size_t k, double* out) {
  return guarded([&] {
    not_null(path, "path");
    not_null(out, "out");
    if (len < 2) throw InvalidArgument("path needs at least two points");
    FinePath p;
    p.values.assign(path, path + len);
    const auto inc = increments_on_grid(p, k);
    std::copy(inc.begin(), inc.end(), out);
  });
}

lvc_status lvc_cdf_empirical(const double* samples, size_t n, lvc_cdf** out) {
  return guarded([&] {
    not_null(samples, "samples");
    not_null(out, "out");
    *out = new lvc_cdf{std::make_shared<const EmpiricalCdf>(std::vector<double>(samples, samples + n))};
  });
}

lvc_status lvc_cdf_endpoint(const lvc_model* m, size_t draws, const lvc_rng* r, lvc_cdf** out) {
  return guarded([&] {
    not_null(m, "model");
    not_null(r, "rng");
    not_null(out, "out");
    *out = new lvc_cdf{endpoint_cdf(m->model, draws, r->rng)};
  });
}

lvc_status lvc_cdf_normal(double sd, lvc_cdf** out) {
  return guarded([&] {
    not_null(out, "out");
    *out = new lvc_cdf{std::make_shared<const NormalCdf>(sd)};
  });
}

void lvc_cdf_free(lvc_cdf* c) { delete c; }

lvc_status lvc_cdf_query(const lvc_cdf* c, double x, double* cdf_left, double* atom) {
  return guarded([&] {
    not_null(c, "cdf");
    if (cdf_left) *cdf_left = c->cdf->cdf_left(x);
    if (atom) *atom = c->cdf->atom(x);
  });
}

lvc_status lvc_endpoint_comonotone(double x1, const lvc_cdf* fx, double u, double* out) {
  return guarded([&] {
    not_null(fx, "cdf");
    not_null(out, "out");
    *out = endpoint_comonotone(x1, *fx->cdf, u);
  });
}

lvc_status lvc_rank_permutation(const double* dx, const double* ties, const double* dw, size_t k, size_t* pi) {
  return guarded([&] {
    not_null(dx, "dx");
    not_null(ties, "ties");
    not_null(dw, "dw");
    not_null(pi, "pi");
    const Permutation p = rank_permutation({dx, k}, {ties, k}, {dw, k});
    for (std::size_t i = 0; i < k; ++i) pi[i] = p.pi[i] + 1;
  });
}

lvc_status lvc_recommended_k(double mu4, double* raw, size_t* k) {
  return guarded([&] {
    const KRecommendation r = recommended_k(mu4);
    if (raw) *raw = r.raw;
    if (k) *k = r.k;
  });
}

lvc_status lvc_empirical_rank_coupling(const double* xi, const double* zeta, size_t n, size_t u_index,
                                       double* xi_out, double* zeta_out) {
  return guarded([&] {
    not_null(xi, "xi");
    not_null(zeta, "zeta");
    const auto [a, b] = empirical_rank_coupling({xi, n}, {zeta, n}, u_index);
    if (xi_out) *xi_out = a;
    if (zeta_out) *zeta_out = b;
  });
}

lvc_status lvc_couple(const lvc_model* m, const size_t* ks, size_t levels, int q, const lvc_cdf* endpoint,
                      lvc_rng* r, lvc_coupled** out) {
  return guarded([&] {
    not_null(m, "model");
    not_null(endpoint, "endpoint");
    not_null(r, "rng");
    not_null(out, "out");
    const auto sizes = level_sizes(ks, levels);
    *out = new lvc_coupled{hierarchical_coupling(m->model, sizes, q, *endpoint->cdf, r->rng)};
  });
}

void lvc_coupled_free(lvc_coupled* c) { delete c; }

size_t lvc_coupled_length(const lvc_coupled* c) { return c ? c->paths.x.values.size() : 0; }

lvc_status lvc_coupled_paths(const lvc_coupled* c, double* x, double* w, double* w_prime, size_t len) {
  return guarded([&] {
    not_null(c, "coupled");
    if (len != c->paths.x.values.size()) throw InvalidArgument("buffer length must equal the path length");
    if (x) std::copy(c->paths.x.values.begin(), c->paths.x.values.end(), x);
    if (w) std::copy(c->paths.w.values.begin(), c->paths.w.values.end(), w);
    if (w_prime) std::copy(c->paths.w_prime.values.begin(), c->paths.w_prime.values.end(), w_prime);
  });
}

lvc_status lvc_coupled_endpoint(const lvc_coupled* c, double* w1) {
  return guarded([&] {
    not_null(c, "coupled");
    not_null(w1, "w1");
    *w1 = c->paths.endpoint_w1;
  });
}

lvc_status lvc_coupled_sup_distance(const lvc_coupled* c, double* out) {
  return guarded([&] {
    not_null(c, "coupled");
    not_null(out, "out");
    *out = sup_distance(c->paths);
  });
}

lvc_status lvc_coupled_permutation(const lvc_coupled* c, size_t level, size_t cell, size_t* pi, size_t k) {
  return guarded([&] {
    not_null(c, "coupled");
    not_null(pi, "pi");
    if (level >= c->paths.levels.size()) throw InvalidArgument("level out of range");
    const auto& perms = c->paths.levels[level].permutations;
    if (cell >= perms.size()) throw InvalidArgument("cell out of range");
    if (k != perms[cell].size()) throw InvalidArgument("buffer length must equal the level size");
    for (std::size_t i = 0; i < k; ++i) pi[i] = perms[cell].pi[i] + 1;
  });
}

lvc_status lvc_wasserstein2(const double* a, const double* b, size_t n, double* out) {
  return guarded([&] {
    not_null(a, "a");
    not_null(b, "b");
    not_null(out, "out");
    *out = wasserstein2_empirical({a, n}, {b, n});
  });
}

lvc_status lvc_msmd(const lvc_model* m, const size_t* ks, size_t levels, int q, const lvc_cdf* endpoint,
                    size_t reps, const lvc_rng* r, double* rms, double* rms_se, double* endpoint_rmse) {
  return guarded([&] {
    not_null(m, "model");
    not_null(endpoint, "endpoint");
    not_null(r, "rng");
    CouplingConfig cc;
    cc.ks = level_sizes(ks, levels);
    cc.cells = dyadic_cells(q);
    cc.endpoint = endpoint->cdf;
    const MsmdResult res = msmd_estimate(m->model, cc, reps, r->rng);
    if (rms) *rms = res.rms.mean;
    if (rms_se) *rms_se = res.rms.std_error;
    if (endpoint_rmse) *endpoint_rmse = res.endpoint_rmse.mean;
  });
}

lvc_status lvc_config_create(lvc_config** out) {
  return guarded([&] {
    not_null(out, "out");
    *out = new lvc_config{};
  });
}

void lvc_config_free(lvc_config* c) { delete c; }

lvc_status lvc_config_set(lvc_config* c, const char* key, const char* value) {
  return guarded([&] {
    not_null(c, "config");
    not_null(key, "key");
    not_null(value, "value");
    apply_setting(c->cfg, key, value);
  });
}

lvc_status lvc_config_load_file(lvc_config* c, const char* path) {
  return guarded([&] {
    not_null(c, "config");
    not_null(path, "path");
    c->cfg = load_config_file(path, c->cfg);
  });
}

lvc_status lvc_config_echo(const lvc_config* c, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    not_null(c, "config");
    copy_out(config_echo(c->cfg), buf, cap, needed);
  });
}

size_t lvc_experiment_count(void) { return experiment_names().size(); }

const char* lvc_experiment_name(size_t i) {
  const auto& names = experiment_names();
  return i < names.size() ? names[i].c_str() : nullptr;
}

lvc_status lvc_run_experiment(const char* name, const lvc_config* c, char* summary, size_t cap, size_t* needed) {
  return guarded([&] {
    not_null(name, "name");
    not_null(c, "config");
    const ExperimentOutput out = run_experiment(name, c->cfg);
    std::string text;
    for (const auto& line : out.summary) text += line + "\n";
    for (const auto& f : out.files) text += "wrote " + f + "\n";
    copy_out(text, summary, cap, needed);
  });
}

}  // extern "C"
