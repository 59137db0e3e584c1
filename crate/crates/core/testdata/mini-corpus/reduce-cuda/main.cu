#include <cstdio>
#include <cstdint>
#include <vector>

/* Block-level shared-memory reduction followed by an atomic add. */
__global__ void reduce_sum(const int *v, int n, unsigned long long *out) {
  __shared__ long long buf[256];
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  buf[threadIdx.x] = i < n ? v[i] : 0;
  __syncthreads();
  for (int s = blockDim.x / 2; s > 0; s >>= 1) {
    if (threadIdx.x < s) buf[threadIdx.x] += buf[threadIdx.x + s];
    __syncthreads();
  }
  if (threadIdx.x == 0) atomicAdd(out, (unsigned long long)buf[0]);
}

int64_t reference_sum(const std::vector<int> &v);

int main() {
  const int n = 1 << 20;
  std::vector<int> v(n);
  int64_t expect = 0;
  for (int i = 0; i < n; i++) {
    v[i] = (i * 7) % 13 - 6;
    expect += v[i];
  }
  int *dv;
  unsigned long long *dout, hout = 0;
  cudaMalloc(&dv, n * sizeof(int));
  cudaMalloc(&dout, sizeof(unsigned long long));
  cudaMemcpy(dv, v.data(), n * sizeof(int), cudaMemcpyHostToDevice);
  cudaMemcpy(dout, &hout, sizeof(hout), cudaMemcpyHostToDevice);
  reduce_sum<<<(n + 255) / 256, 256>>>(dv, n, dout);
  cudaMemcpy(&hout, dout, sizeof(hout), cudaMemcpyDeviceToHost);
  cudaFree(dv);
  cudaFree(dout);
  int64_t got = (int64_t)hout;
  printf("sum = %lld (expected %lld)\n", (long long)got, (long long)expect);
  printf("%s\n", got == expect ? "PASS" : "FAIL");
  return got == expect ? 0 : 1;
}
