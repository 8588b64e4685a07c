int main() {
  long v = 1;
  long w = v >> 64;
  return (int)w;
}
