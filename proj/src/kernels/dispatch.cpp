#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "bayesic/errors.hpp"
#include "bayesic/kernels.hpp"

namespace bayesic::kernels {
namespace {

struct KernelTable {
  Isa isa;
  double (*sum)(std::span<const double>);
  double (*sum_sq)(std::span<const double>);
  double (*sum_abs_dev)(std::span<const double>, double);
  double (*max_value)(std::span<const double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*exp_shifted)(std::span<const double>, double, std::span<double>);
  void (*scale)(std::span<double>, double);
};

constexpr KernelTable kScalarTable{Isa::Scalar,        scalar::sum,       scalar::sum_sq,
                                   scalar::sum_abs_dev, scalar::max_value, scalar::dot,
                                   scalar::exp_shifted, scalar::scale};

#if defined(BAYESIC_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::Avx2,         avx2::sum,       avx2::sum_sq,
                                 avx2::sum_abs_dev, avx2::max_value, avx2::dot,
                                 avx2::exp_shifted, avx2::scale};
#endif

const KernelTable* table_for(Isa isa) {
#if defined(BAYESIC_HAVE_AVX2)
  if (isa == Isa::Avx2) return &kAvx2Table;
#endif
  return &kScalarTable;
}

const KernelTable* initial_table() {
  if (const char* forced = std::getenv("BAYESIC_ISA")) {
    if (std::string_view(forced) == "scalar") return &kScalarTable;
  }
  return table_for(detected_isa());
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

inline const KernelTable& current() { return *active().load(std::memory_order_acquire); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(BAYESIC_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() { return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return current().isa; }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ArgumentError("kernel ISA '" + std::string(isa_name(isa)) + "' is not supported on this host");
  }
  active().store(table_for(isa), std::memory_order_release);
}

double sum(std::span<const double> x) { return current().sum(x); }
double sum_sq(std::span<const double> x) { return current().sum_sq(x); }
double sum_abs_dev(std::span<const double> x, double center) {
  return current().sum_abs_dev(x, center);
}
double max_value(std::span<const double> x) { return current().max_value(x); }
double dot(std::span<const double> a, std::span<const double> b) { return current().dot(a, b); }
double exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  return current().exp_shifted(x, shift, out);
}
void scale(std::span<double> x, double factor) { current().scale(x, factor); }

}  // namespace bayesic::kernels
