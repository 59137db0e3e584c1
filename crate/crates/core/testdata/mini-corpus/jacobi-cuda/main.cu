#include <cmath>
#include <cstdio>
#include <vector>

// Jacobi relaxation on a 2-D grid with fixed boundary values.
const int NX = 128, NY = 128, ITERS = 50;

__global__ void sweep(const double *u, double *v) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  int j = blockIdx.y * blockDim.y + threadIdx.y;
  if (i > 0 && i < NX - 1 && j > 0 && j < NY - 1)
    v[j * NX + i] = 0.25 * (u[j * NX + i - 1] + u[j * NX + i + 1] + u[(j - 1) * NX + i] + u[(j + 1) * NX + i]);
}

int main() {
  std::vector<double> u(NX * NY, 0.0), r(NX * NY, 0.0), s(NX * NY, 0.0);
  for (int i = 0; i < NX; i++) u[i] = r[i] = s[i] = 1.0;
  double *du, *dv;
  cudaMalloc(&du, NX * NY * sizeof(double));
  cudaMalloc(&dv, NX * NY * sizeof(double));
  cudaMemcpy(du, u.data(), NX * NY * sizeof(double), cudaMemcpyHostToDevice);
  cudaMemcpy(dv, u.data(), NX * NY * sizeof(double), cudaMemcpyHostToDevice);
  dim3 block(16, 16), grid((NX + 15) / 16, (NY + 15) / 16);
  for (int it = 0; it < ITERS; it++) {
    sweep<<<grid, block>>>(du, dv);
    double *t = du; du = dv; dv = t;
  }
  cudaMemcpy(u.data(), du, NX * NY * sizeof(double), cudaMemcpyDeviceToHost);
  cudaFree(du);
  cudaFree(dv);
  for (int it = 0; it < ITERS; it++) {
    for (int j = 1; j < NY - 1; j++)
      for (int i = 1; i < NX - 1; i++)
        s[j * NX + i] = 0.25 * (r[j * NX + i - 1] + r[j * NX + i + 1] + r[(j - 1) * NX + i] + r[(j + 1) * NX + i]);
    r.swap(s);
  }
  double diff = 0.0;
  for (int k = 0; k < NX * NY; k++) diff = fmax(diff, fabs(u[k] - r[k]));
  printf("diff %g\n", diff);
  printf("%s\n", diff < 1e-12 ? "PASS" : "FAIL");
  return diff < 1e-12 ? 0 : 1;
}
