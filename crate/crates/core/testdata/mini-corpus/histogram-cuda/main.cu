#include <cstdio>
#include <vector>

#define BINS 64

// Privatized histogram in shared memory, merged with global atomics.
__global__ void histogram(const unsigned *data, int n, unsigned *hist) {
  __shared__ unsigned local[BINS];
  for (int b = threadIdx.x; b < BINS; b += blockDim.x) local[b] = 0;
  __syncthreads();
  for (int i = blockIdx.x * blockDim.x + threadIdx.x; i < n; i += gridDim.x * blockDim.x)
    atomicAdd(&local[data[i] % BINS], 1u);
  __syncthreads();
  for (int b = threadIdx.x; b < BINS; b += blockDim.x) atomicAdd(&hist[b], local[b]);
}

int main() {
  const int n = 1 << 20;
  std::vector<unsigned> data(n);
  unsigned seed = 12345u;
  for (int i = 0; i < n; i++) {
    seed = seed * 1103515245u + 12345u;
    data[i] = seed >> 8;
  }
  std::vector<unsigned> hist(BINS, 0), ref(BINS, 0);
  unsigned *d_data, *d_hist;
  cudaMalloc(&d_data, n * sizeof(unsigned));
  cudaMalloc(&d_hist, BINS * sizeof(unsigned));
  cudaMemcpy(d_data, data.data(), n * sizeof(unsigned), cudaMemcpyHostToDevice);
  cudaMemset(d_hist, 0, BINS * sizeof(unsigned));
  histogram<<<64, 256>>>(d_data, n, d_hist);
  cudaMemcpy(hist.data(), d_hist, BINS * sizeof(unsigned), cudaMemcpyDeviceToHost);
  cudaFree(d_data);
  cudaFree(d_hist);
  for (int i = 0; i < n; i++) ref[data[i] % BINS]++;
  bool ok = hist == ref;
  printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
