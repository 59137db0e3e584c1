#include <cstdio>

__global__ void k(float *x, int n) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  if (i < n) x[i] *= 2.0f;
}

@@MAIN@@int main(int argc, char *argv[]) {
  int n = argc > 1 ? atoi(argv[1]) : 256;
  float *d;
  cudaMalloc(&d, n * sizeof(float));
  k<<<(n + 127) / 128, 128>>>(d, n);
  cudaDeviceSynchronize();
  cudaFree(d);
  printf("PASS\n");
  return 0;
}@@END@@
