#include "htgd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "htgd/errors.hpp"

namespace htgd::kernels {
namespace {

constexpr KernelTable kScalar{scalar::cmul, scalar::cmul_acc, scalar::scale_real, scalar::norm_sq};
#if defined(HTGD_BUILD_AVX2)
constexpr KernelTable kAvx2{avx2::cmul, avx2::cmul_acc, avx2::scale_real, avx2::norm_sq};
#endif

bool cpu_has_avx2() {
#if defined(HTGD_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("HTGD_ISA")) {
    const Isa wanted = parse_isa(env);
    if (isa_supported(wanted)) return wanted;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> t{&table(initial_isa())};
  return t;
}

void check_len(std::size_t a, std::size_t b) {
  if (a != b) throw_invalid("kernel operands differ in length");
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
  }
  return false;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  throw_invalid("unknown ISA '" + std::string(name) + "'");
}

const KernelTable& table(Isa isa) {
  if (isa == Isa::scalar) return kScalar;
#if defined(HTGD_BUILD_AVX2)
  if (cpu_has_avx2()) return kAvx2;
#endif
  throw_invalid("ISA " + std::string(isa_name(isa)) + " is not available on this CPU/build");
}

Isa active_isa() { return active_table().load() == &kScalar ? Isa::scalar : Isa::avx2; }

void set_isa(Isa isa) { active_table().store(&table(isa)); }

void cmul(std::span<const Complex> x, std::span<const Complex> y, std::span<Complex> out) {
  check_len(x.size(), y.size());
  check_len(x.size(), out.size());
  active_table().load()->cmul(x.data(), y.data(), out.data(), x.size());
}

void cmul_acc(std::span<const Complex> x, std::span<const Complex> y, std::span<Complex> acc) {
  check_len(x.size(), y.size());
  check_len(x.size(), acc.size());
  active_table().load()->cmul_acc(x.data(), y.data(), acc.data(), x.size());
}

void scale_real(std::span<const Complex> x, std::span<const double> w, std::span<Complex> out) {
  check_len(x.size(), w.size());
  check_len(x.size(), out.size());
  active_table().load()->scale_real(x.data(), w.data(), out.data(), x.size());
}

double norm_sq(std::span<const Complex> x) { return active_table().load()->norm_sq(x.data(), x.size()); }

}  // namespace htgd::kernels
