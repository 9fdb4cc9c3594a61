package demo;

public class Parity {
    public boolean showBug(int x) {
        int remainder = x % 2;
        return remainder == 1;
    }

    public int countOdd(int[] xs) {
        int n = 0;
        for (int x : xs) {
            if (showBug(x)) {
                n++;
            }
        }
        return n;
    }
}
