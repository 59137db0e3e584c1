// Element-wise vector addition.
#include <cstdio>
#include <vector>
#include <cuda_runtime.h>

#define N 100000

__global__ void vecadd(const float *a, const float *b, float *c, int n) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  if (i < n) c[i] = a[i] + b[i];
}

int main() {
  std::vector<float> a(N), b(N), c(N);
  for (int i = 0; i < N; i++) {
    a[i] = i * 0.5f;
    b[i] = (N - i) * 0.5f;
  }
  float *da, *db, *dc;
  cudaMalloc(&da, N * sizeof(float));
  cudaMalloc(&db, N * sizeof(float));
  cudaMalloc(&dc, N * sizeof(float));
  cudaMemcpy(da, a.data(), N * sizeof(float), cudaMemcpyHostToDevice);
  cudaMemcpy(db, b.data(), N * sizeof(float), cudaMemcpyHostToDevice);
  vecadd<<<(N + 255) / 256, 256>>>(da, db, dc, N);
  cudaMemcpy(c.data(), dc, N * sizeof(float), cudaMemcpyDeviceToHost);
  cudaFree(da); cudaFree(db); cudaFree(dc);
  bool ok = true;
  for (int i = 0; i < N; i++) {
    if (c[i] != N * 0.5f) { ok = false; break; }
  }
  printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
