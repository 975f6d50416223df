#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Heap peak tracking for the memory-contract test in test_adjoint.cpp.
// malloc is interposed inside this binary so Eigen's aligned allocations
// (plain malloc under the hood) are counted too.
#include <atomic>
#include <cstddef>
#include <malloc.h>

namespace testmem {
std::atomic<long long> live_bytes{0};
std::atomic<long long> peak_bytes{0};

inline void bump(long long delta) {
  const long long now = live_bytes += delta;
  if (delta > 0) {
    long long peak = peak_bytes.load(std::memory_order_relaxed);
    while (now > peak && !peak_bytes.compare_exchange_weak(peak, now)) {
    }
  }
}

void reset_peak() { peak_bytes.store(live_bytes.load()); }
long long peak() { return peak_bytes.load(); }
long long live() { return live_bytes.load(); }
}  // namespace testmem

extern "C" {
void* __libc_malloc(size_t);
void* __libc_calloc(size_t, size_t);
void* __libc_realloc(void*, size_t);
void __libc_free(void*);

void* malloc(size_t n) {
  void* p = __libc_malloc(n);
  if (p) testmem::bump(static_cast<long long>(malloc_usable_size(p)));
  return p;
}

void* calloc(size_t n, size_t sz) {
  void* p = __libc_calloc(n, sz);
  if (p) testmem::bump(static_cast<long long>(malloc_usable_size(p)));
  return p;
}

void* realloc(void* p, size_t n) {
  if (p) testmem::bump(-static_cast<long long>(malloc_usable_size(p)));
  void* q = __libc_realloc(p, n);
  if (q) testmem::bump(static_cast<long long>(malloc_usable_size(q)));
  return q;
}

void free(void* p) {
  if (p) testmem::bump(-static_cast<long long>(malloc_usable_size(p)));
  __libc_free(p);
}
}
