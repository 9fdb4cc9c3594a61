package demo;

public class Ratio {
    public double showBug(int done, int total) {
        double ratio;
        ratio = (double) (done / total);
        double percent = ratio * 100.0;
        return percent;
    }
}
