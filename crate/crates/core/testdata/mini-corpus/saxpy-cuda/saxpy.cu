#include <cmath>
#include <cstdio>
#include <vector>

// y = a*x + y, one thread per element.
__global__ void saxpy(int n, float a, const float *x, float *y) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  if (i < n) y[i] = a * x[i] + y[i];
}

int main() {
  const int n = 1 << 18;
  const float a = 2.0f;
  std::vector<float> x(n), y(n), expect(n);
  for (int i = 0; i < n; ++i) {
    x[i] = static_cast<float>(i % 17);
    y[i] = static_cast<float>(i % 5);
    expect[i] = a * x[i] + y[i];
  }
  float *dx, *dy;
  cudaMalloc(&dx, n * sizeof(float));
  cudaMalloc(&dy, n * sizeof(float));
  cudaMemcpy(dx, x.data(), n * sizeof(float), cudaMemcpyHostToDevice);
  cudaMemcpy(dy, y.data(), n * sizeof(float), cudaMemcpyHostToDevice);
  saxpy<<<(n + 255) / 256, 256>>>(n, a, dx, dy);
  cudaMemcpy(y.data(), dy, n * sizeof(float), cudaMemcpyDeviceToHost);
  cudaFree(dx);
  cudaFree(dy);
  int bad = 0;
  for (int i = 0; i < n; ++i)
    if (std::fabs(y[i] - expect[i]) > 1e-5f) ++bad;
  if (bad == 0) printf("PASS\n");
  else printf("FAIL: %d mismatches\n", bad);
  return bad == 0 ? 0 : 1;
}
