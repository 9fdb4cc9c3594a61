package demo;

public class Accumulator {
    public int showBug(int n) {
        int total = 0;
        int step = 1;
        int i = 0;
        while (i < n) {
            total += 1000000;
            step = 2;
            i = i + step;
        }
        step = 1;
        return total;
    }
}
