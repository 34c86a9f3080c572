#include "model_syntax.hpp"

#include <charconv>
#include <cmath>
#include <optional>

#include "errors.hpp"

namespace levycouple {

namespace {

struct Node {
  std::string name;
  std::optional<double> number;
  std::vector<Node> args;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Node parse() {
    Node n = term();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("model '" + std::string(s_) + "': " + what + " at offset " +
                      std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  static bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '_';
  }

  double scalar() {
    skip_space();
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    if (pos_ < s_.size() && s_[pos_] == '+') ++begin;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{}) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  Node term() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      Node n;
      const std::size_t start = pos_;
      while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
      n.name = std::string(s_.substr(start, pos_ - start));
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == ')') {
          ++pos_;
          return n;
        }
        for (;;) {
          n.args.push_back(term());
          skip_space();
          if (pos_ < s_.size() && s_[pos_] == ',') {
            ++pos_;
            continue;
          }
          if (pos_ < s_.size() && s_[pos_] == ')') {
            ++pos_;
            break;
          }
          fail("expected ',' or ')'");
        }
      }
      return n;
    }
    double v = scalar();
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      v = std::pow(v, scalar());
    }
    Node n;
    n.number = v;
    return n;
  }
};

double num(const Node& n, const std::string& ctx) {
  if (!n.number) throw ConfigError(ctx + ": expected a number, got '" + n.name + "'");
  return *n.number;
}

void arity(const Node& n, std::size_t lo, std::size_t hi) {
  if (n.number) throw ConfigError("expected a model, got a number");
  if (n.args.size() < lo || n.args.size() > hi)
    throw ConfigError("'" + n.name + "' takes " +
                      (lo == hi ? std::to_string(lo)
                                : std::to_string(lo) + " to " + std::to_string(hi)) +
                      " arguments");
}

TruncatedStable exp_stable(double eps1, double eps2) {
  return TruncatedStable{1.5, 0.4, 0.6, eps2, eps1};
}

TruncatedStable stable_base() { return TruncatedStable{1.5, 0.4, 0.6, std::ldexp(1.0, -40), 1.0}; }

JumpLaw to_law(const Node& n) {
  if (n.name == "normal") {
    arity(n, 2, 2);
    return NormalJumps{num(n.args[0], "normal"), num(n.args[1], "normal")};
  }
  if (n.name == "exponential") {
    arity(n, 1, 1);
    return ExponentialJumps{num(n.args[0], "exponential")};
  }
  if (n.name == "uniform") {
    arity(n, 2, 2);
    return UniformJumps{num(n.args[0], "uniform"), num(n.args[1], "uniform")};
  }
  if (n.name == "discrete") {
    if (n.args.empty() || n.args.size() % 2 != 0)
      throw ConfigError("'discrete' takes value, probability pairs");
    DiscreteJumps d;
    for (std::size_t i = 0; i < n.args.size(); i += 2) {
      d.values.push_back(num(n.args[i], "discrete"));
      d.probs.push_back(num(n.args[i + 1], "discrete"));
    }
    return d;
  }
  throw ConfigError("unknown jump law '" + n.name + "'");
}

SpecPtr to_spec(const Node& n);

ModelVariant to_variant(const Node& n, double* jitter) {
  const std::string& f = n.name;
  if (f == "truncated-stable") {
    arity(n, 5, 5);
    return TruncatedStable{num(n.args[0], f), num(n.args[1], f), num(n.args[2], f),
                           num(n.args[3], f), num(n.args[4], f)};
  }
  if (f == "exp-stable") {
    arity(n, 2, 2);
    return exp_stable(num(n.args[0], f), num(n.args[1], f));
  }
  if (f == "stable-base") {
    arity(n, 0, 0);
    return stable_base();
  }
  if (f == "annulus") {
    arity(n, 1, 1);
    const double level = num(n.args[0], f);
    if (level != std::floor(level) || level < 0 || level > 39)
      throw ConfigError("annulus level must be an integer in [0, 39]");
    const int k = static_cast<int>(level);
    return SmallJumpAnnulus{make_spec(stable_base()), std::ldexp(1.0, -k - 1), std::ldexp(1.0, -k)};
  }
  if (f == "small-jumps") {
    arity(n, 3, 3);
    return SmallJumpAnnulus{to_spec(n.args[0]), num(n.args[1], f), num(n.args[2], f)};
  }
  if (f == "perturbed") {
    arity(n, 1, 2);
    SpecPtr inner = n.args.size() == 2 ? to_spec(n.args[1]) : make_spec(exp_stable(0.1, 0.03));
    return PerturbedBM{num(n.args[0], f), inner};
  }
  if (f == "gamma") {
    arity(n, 2, 2);
    return GammaMartingale{num(n.args[0], f), num(n.args[1], f)};
  }
  if (f == "fig1-gamma") {
    arity(n, 0, 0);
    return GammaMartingale{1.0, 1.0};
  }
  if (f == "cpp" || f == "cpp-raw") {
    arity(n, 2, 2);
    return CompoundPoissonDrift{num(n.args[0], f), to_law(n.args[1]), f == "cpp"};
  }
  if (f == "cpp-atoms") {
    arity(n, 1, 1);
    return CompoundPoissonDrift{num(n.args[0], f), DiscreteJumps{{-1.0, 1.0}, {0.5, 0.5}}, true};
  }
  if (f == "brownian") {
    arity(n, 0, 0);
    return BrownianMotion{};
  }
  if (f == "jitter") {
    arity(n, 2, 2);
    if (n.args[0].number) throw ConfigError("jitter: first argument must be a model");
    ModelVariant v = to_variant(n.args[0], jitter);
    *jitter = num(n.args[1], f);
    return v;
  }
  throw ConfigError("unknown model '" + f + "'");
}

SpecPtr to_spec(const Node& n) {
  if (n.number) throw ConfigError("expected a model, got a number");
  double jitter = 0.0;
  ModelVariant v = to_variant(n, &jitter);
  return make_spec(std::move(v), jitter);
}

std::string join(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ",";
    out += p;
  }
  return out;
}

std::string format_law(const JumpLaw& law) {
  if (const auto* j = std::get_if<NormalJumps>(&law))
    return "normal(" + join({format_number(j->mean), format_number(j->sd)}) + ")";
  if (const auto* j = std::get_if<ExponentialJumps>(&law))
    return "exponential(" + format_number(j->rate) + ")";
  if (const auto* j = std::get_if<UniformJumps>(&law))
    return "uniform(" + join({format_number(j->lo), format_number(j->hi)}) + ")";
  const auto& d = std::get<DiscreteJumps>(law);
  std::string out = "discrete(";
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (i) out += ",";
    out += format_number(d.values[i]) + "," + format_number(d.probs[i]);
  }
  return out + ")";
}

std::string format_variant(const ModelVariant& v) {
  if (const auto* m = std::get_if<TruncatedStable>(&v))
    return "truncated-stable(" +
           join({format_number(m->alpha), format_number(m->c_neg), format_number(m->c_pos),
                 format_number(m->eps_lo), format_number(m->eps_hi)}) +
           ")";
  if (const auto* m = std::get_if<CompoundPoissonDrift>(&v))
    return std::string(m->standardize ? "cpp(" : "cpp-raw(") + format_number(m->rate) + "," +
           format_law(m->jumps) + ")";
  if (const auto* m = std::get_if<GammaMartingale>(&v))
    return "gamma(" + join({format_number(m->shape), format_number(m->rate)}) + ")";
  if (const auto* m = std::get_if<PerturbedBM>(&v))
    return "perturbed(" + format_number(m->eps) + "," + format_model(*m->inner) + ")";
  if (std::holds_alternative<BrownianMotion>(v)) return "brownian";
  const auto& a = std::get<SmallJumpAnnulus>(v);
  return "small-jumps(" + format_model(*a.base) + "," + format_number(a.eps_lo) + "," +
         format_number(a.eps_hi) + ")";
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

SpecPtr parse_model(std::string_view text) { return to_spec(Parser(text).parse()); }

std::string format_model(const LevyModelSpec& spec) {
  std::string body = format_variant(spec.variant);
  if (spec.jitter_variance != 0.0) return "jitter(" + body + "," + format_number(spec.jitter_variance) + ")";
  return body;
}

}  // namespace levycouple
