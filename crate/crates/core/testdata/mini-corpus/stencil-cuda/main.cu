#include <cmath>
#include <cstdio>
#include <vector>

// 1-D three-point stencil, repeated for a few sweeps.
#define N 4096
#define SWEEPS 8

/* One thread per interior point; the
   boundary threads copy their input. */
__global__ void stencil(const double *in, double *out, int n) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  if (i == 0 || i == n - 1) {
    out[i] = in[i];
  } else if (i < n) {
    out[i] = 0.25 * in[i - 1] + 0.5 * in[i] + 0.25 * in[i + 1]; // weights sum to 1
  }
}

int main() {
  std::vector<double> a(N), ref(N), tmp(N);
  for (int i = 0; i < N; i++) a[i] = ref[i] = std::sin(i * 0.01);
  double *d_in, *d_out;
  cudaMalloc(&d_in, N * sizeof(double));
  cudaMalloc(&d_out, N * sizeof(double));
  cudaMemcpy(d_in, a.data(), N * sizeof(double), cudaMemcpyHostToDevice);
  for (int s = 0; s < SWEEPS; s++) {
    stencil<<<(N + 127) / 128, 128>>>(d_in, d_out, N);
    double *t = d_in; d_in = d_out; d_out = t;
    for (int i = 1; i < N - 1; i++)
      tmp[i] = 0.25 * ref[i - 1] + 0.5 * ref[i] + 0.25 * ref[i + 1];
    tmp[0] = ref[0];
    tmp[N - 1] = ref[N - 1];
    ref.swap(tmp);
  }
  cudaMemcpy(a.data(), d_in, N * sizeof(double), cudaMemcpyDeviceToHost);
  cudaFree(d_in);
  cudaFree(d_out);
  double diff = 0.0;
  for (int i = 0; i < N; i++) diff = fmax(diff, fabs(a[i] - ref[i]));
  printf("max diff %g\n", diff);
  printf("%s\n", diff < 1e-12 ? "PASS" : "FAIL");
  return diff < 1e-12 ? 0 : 1;
}
