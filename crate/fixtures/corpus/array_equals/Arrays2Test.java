package demo;

import org.junit.Test;
import static org.junit.Assert.assertTrue;

public class Arrays2Test {
    @Test
    public void equalContents() {
        assertTrue(new Arrays2().showBug(3));
    }
}
