int u[4];
int main() {
  u[0] = 1;
  u[3] = 2;
  return u[0] + u[3];
}
