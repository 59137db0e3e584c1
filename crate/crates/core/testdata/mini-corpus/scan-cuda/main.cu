#include <cstdio>
#include <vector>

#define BLOCK 512

// Single-block inclusive scan (Hillis-Steele) in shared memory.
__global__ void scan(const int *in, int *out, int n) {
  __shared__ int buf[BLOCK];
  int t = threadIdx.x;
  buf[t] = t < n ? in[t] : 0;
  __syncthreads();
  for (int off = 1; off < BLOCK; off <<= 1) {
    int v = t >= off ? buf[t - off] : 0;
    __syncthreads();
    buf[t] += v;
    __syncthreads();
  }
  if (t < n) out[t] = buf[t];
}

int main() {
  const int n = BLOCK;
  std::vector<int> in(n), out(n);
  for (int i = 0; i < n; i++) in[i] = (i % 3) + 1;
  int *d_in, *d_out;
  cudaMalloc(&d_in, n * sizeof(int));
  cudaMalloc(&d_out, n * sizeof(int));
  cudaMemcpy(d_in, in.data(), n * sizeof(int), cudaMemcpyHostToDevice);
  scan<<<1, BLOCK>>>(d_in, d_out, n);
  cudaMemcpy(out.data(), d_out, n * sizeof(int), cudaMemcpyDeviceToHost);
  cudaFree(d_in);
  cudaFree(d_out);
  int acc = 0;
  bool ok = true;
  for (int i = 0; i < n; i++) {
    acc += in[i];
    if (out[i] != acc) ok = false;
  }
  printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
