package demo;

public class Bits {
    public int showBug(int value) {
        int shift = 32;
        int result = value >>> shift;
        int count = 0;
        while (result != 0) {
            count = count + (result & 1);
            result = result >>> 1;
        }
        return count;
    }
}
