#include <atomic>
#include <cstdlib>
#include <cstring>

#include "colla/kernels.hpp"

namespace colla::kern {

const Ops* avx2_ops_impl() noexcept;  // defined in kernels_avx2.cpp

bool avx2_supported() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops* avx2_ops() noexcept {
  return avx2_supported() ? avx2_ops_impl() : nullptr;
}

namespace {

const Ops* pick_default() noexcept {
  if (const char* env = std::getenv("COLLA_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
    if (std::strcmp(env, "avx2") == 0) {
      if (const Ops* ops = avx2_ops()) return ops;
      return &scalar_ops();
    }
    // anything else, including "auto", falls through to detection
  }
  if (const Ops* ops = avx2_ops()) return ops;
  return &scalar_ops();
}

std::atomic<const Ops*> g_active{nullptr};

}  // namespace

const Ops& active() noexcept {
  const Ops* ops = g_active.load(std::memory_order_relaxed);
  if (!ops) {
    ops = pick_default();
    g_active.store(ops, std::memory_order_relaxed);
  }
  return *ops;
}

void force_backend(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      g_active.store(&scalar_ops(), std::memory_order_relaxed);
      break;
    case Backend::Avx2:
      g_active.store(avx2_ops() ? avx2_ops() : &scalar_ops(),
                     std::memory_order_relaxed);
      break;
    case Backend::Auto:
      g_active.store(pick_default(), std::memory_order_relaxed);
      break;
  }
}

}  // namespace colla::kern
